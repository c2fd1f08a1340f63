#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "mcvd/rng.hpp"
#include "oracles.hpp"

using namespace mcvd;

TEST_CASE("splitmix64 steps deterministically and scrambles its stream") {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    CHECK(splitmix64(a) == splitmix64(b));
    CHECK(a == b);  // both states advanced identically

    std::uint64_t c = 1;
    std::uint64_t d = 0;
    CHECK(splitmix64(c) != splitmix64(d));

    std::uint64_t state = 42;
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(splitmix64(state));
    CHECK(seen.size() == 1000);
}

TEST_CASE("derive_seed separates children and is order-free") {
    const std::uint64_t parent = 12345;
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < 1000; ++i) seen.insert(derive_seed(parent, i));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(parent, 7) == derive_seed(parent, 7));
    CHECK(derive_seed(parent, 7) != derive_seed(parent + 1, 7));
    // child streams must not collide with the parent's own stream
    CHECK(derive_seed(parent, 0) != parent);
}

TEST_CASE("xoshiro stream is reproducible and seed-sensitive") {
    Xoshiro256pp a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    bool any_diff = false;
    Xoshiro256pp a2(42);
    for (int i = 0; i < 100; ++i) any_diff |= (a2() != c());
    CHECK(any_diff);
}

TEST_CASE("uniform01 stays in [0,1) and fills the range") {
    Xoshiro256pp rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 1e-3);
    CHECK(hi > 1.0 - 1e-3);
}

TEST_CASE("normal sampler matches N(0,1) moments and CDF") {
    NormalSampler rng(2024);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0, sum3 = 0.0;
    int below_half = 0, below_one = 0, below_two = 0, tail = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
        sum3 += x * x * x;
        below_half += x < 0.5;
        below_one += x < 1.0;
        below_two += x < 2.0;
        tail += std::fabs(x) > 4.0;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double skew = sum3 / n;
    // 5-sigma statistical bands for one million draws
    CHECK(std::fabs(mean) < 5.0 / std::sqrt(double(n)));
    CHECK(std::fabs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::fabs(skew) < 5.0 * std::sqrt(15.0 / n));
    auto band = [&](double phi) { return 5.0 * std::sqrt(phi * (1 - phi) / n); };
    CHECK(std::fabs(below_half / double(n) - oracles::kPhiHalf) < band(oracles::kPhiHalf));
    CHECK(std::fabs(below_one / double(n) - oracles::kPhiOne) < band(oracles::kPhiOne));
    CHECK(std::fabs(below_two / double(n) - oracles::kPhiTwo) < band(oracles::kPhiTwo));
    // P(|X|>4) = erfc(4/sqrt(2)) ~ 6.33e-5: the ziggurat tail path must fire
    const double p_tail = mcvd::erfc(4.0 / std::sqrt(2.0));
    CHECK(tail / double(n) == doctest::Approx(p_tail).epsilon(0.5));
}

TEST_CASE("normal sampler is reproducible per seed") {
    NormalSampler a(5), b(5), c(6);
    bool same = true, differ = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.normal();
        same &= (x == b.normal());
        differ |= (x != c.normal());
    }
    CHECK(same);
    CHECK(differ);
}
