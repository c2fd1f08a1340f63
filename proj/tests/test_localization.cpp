#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mcvd/errors.hpp"
#include "mcvd/localization.hpp"
#include "oracles.hpp"

using namespace mcvd;

namespace {

const Vec3 kSource{1.25, -2.0, 3.5};

// Five well-spread anchor centers, distances exact from kSource.
std::vector<Anchor> exact_anchors() {
    const std::vector<Vec3> centers = {
        {0, 5, 0}, {0, 0, 10}, {10, 0, 0}, {-4, 3, -6}, {0, -5, 0}};
    std::vector<Anchor> anchors;
    for (std::size_t k = 0; k < centers.size(); ++k)
        anchors.push_back({centers[k], distance(kSource, centers[k]), static_cast<int>(k + 1)});
    return anchors;
}

CumulativeTrace counted(int id, std::int64_t final_count) {
    CumulativeTrace tr;
    tr.receiver_id = id;
    tr.sample_times = {0.02, 0.04};
    tr.counts = {0, final_count};
    return tr;
}

}  // namespace

TEST_CASE("objective and gradient against hand-expanded sums") {
    const std::vector<Anchor> anchors = {{{0, 0, 0}, 1.0, 1}, {{0, 3, 0}, 2.0, 2}};
    const Vec3 p{2, 0, 0};
    // g1 = 4 - 1 = 3, g2 = 13 - 4 = 9
    CHECK(objective_H(p, anchors) == doctest::Approx(9.0 + 81.0));
    const Vec3 grad = gradient_H(p, anchors);
    CHECK(grad.x == doctest::Approx(4.0 * 3.0 * 2.0 + 4.0 * 9.0 * 2.0));
    CHECK(grad.y == doctest::Approx(4.0 * 9.0 * -3.0));
    CHECK(grad.z == doctest::Approx(0.0));
}

TEST_CASE("gradient matches finite differences of the objective") {
    const std::vector<Anchor> anchors = exact_anchors();
    const Vec3 p{2.3, -1.1, 0.7};
    const Vec3 grad = gradient_H(p, anchors);
    const double h = 1e-6;
    const double fx = (objective_H({p.x + h, p.y, p.z}, anchors) -
                       objective_H({p.x - h, p.y, p.z}, anchors)) / (2 * h);
    const double fy = (objective_H({p.x, p.y + h, p.z}, anchors) -
                       objective_H({p.x, p.y - h, p.z}, anchors)) / (2 * h);
    const double fz = (objective_H({p.x, p.y, p.z + h}, anchors) -
                       objective_H({p.x, p.y, p.z - h}, anchors)) / (2 * h);
    CHECK(grad.x == doctest::Approx(fx).epsilon(1e-6));
    CHECK(grad.y == doctest::Approx(fy).epsilon(1e-6));
    CHECK(grad.z == doctest::Approx(fz).epsilon(1e-6));
}

TEST_CASE("multilateration recovers the source from exact distances") {
    const Vec3 p = multilaterate_init(exact_anchors());
    CHECK(location_error(p, kSource) < 1e-9);
}

TEST_CASE("multilateration rejects bad anchor sets") {
    std::vector<Anchor> anchors = exact_anchors();
    anchors.resize(3);
    try {
        (void)multilaterate_init(anchors);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::TooFewReceivers);
    }

    const std::vector<Anchor> coplanar = {{{0, 0, 0}, 1.0, 1},
                                          {{10, 0, 0}, 1.0, 2},
                                          {{0, 10, 0}, 1.0, 3},
                                          {{10, 10, 0}, 1.0, 4},
                                          {{5, 5, 0}, 1.0, 5}};
    try {
        (void)multilaterate_init(coplanar);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::DegenerateGeometry);
    }

    std::vector<Anchor> zero_d = exact_anchors();
    zero_d[1].distance = 0.0;
    CHECK_THROWS_AS((void)multilaterate_init(zero_d), Error);
}

TEST_CASE("multilateration is translation and rotation equivariant") {
    const std::vector<Anchor> anchors = exact_anchors();
    const Vec3 base = multilaterate_init(anchors);

    const Vec3 shift{10, -20, 5};
    std::vector<Anchor> moved = anchors;
    for (Anchor& a : moved) {
        a.position.x += shift.x;
        a.position.y += shift.y;
        a.position.z += shift.z;
    }
    const Vec3 p_moved = multilaterate_init(moved);
    CHECK(location_error(p_moved, {base.x + shift.x, base.y + shift.y, base.z + shift.z}) < 1e-9);

    // Quarter turn about z: (x, y, z) -> (-y, x, z), exact in floating point.
    std::vector<Anchor> turned = anchors;
    for (Anchor& a : turned) a.position = {-a.position.y, a.position.x, a.position.z};
    const Vec3 p_turned = multilaterate_init(turned);
    CHECK(location_error(p_turned, {-base.y, base.x, base.z}) < 1e-9);
}

TEST_CASE("steepest descent converges on exact anchors and always descends") {
    const std::vector<Anchor> anchors = exact_anchors();
    const Vec3 start{2.75, -3.0, 4.0};
    const SdResult res = steepest_descent(start, anchors);
    CHECK(res.converged);
    CHECK(res.objective <= objective_H(start, anchors));
    CHECK(location_error(res.position, kSource) < 1e-5);

    std::vector<Anchor> noisy = anchors;
    for (std::size_t k = 0; k < noisy.size(); ++k)
        noisy[k].distance *= (k % 2 == 0) ? 1.03 : 0.97;
    const Vec3 far_start{0, 0, 0};
    const SdResult nres = steepest_descent(far_start, noisy);
    CHECK(nres.objective <= objective_H(far_start, noisy));
    CHECK(nres.iterations <= SdOptions{}.max_iters);
}

TEST_CASE("steepest descent rejects malformed input") {
    const std::vector<Anchor> anchors = exact_anchors();
    const std::vector<Anchor> none;
    CHECK_THROWS_AS((void)steepest_descent({0, 0, 0}, none), Error);
    SdOptions opt;
    opt.backtrack = 1.0;
    CHECK_THROWS_AS((void)steepest_descent({0, 0, 0}, anchors, opt), Error);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)steepest_descent({inf, 0, 0}, anchors), Error);
}

TEST_CASE("receiver selection ranks by final count with id tiebreak") {
    const std::vector<CumulativeTrace> traces = {counted(1, 100), counted(2, 75), counted(3, 150),
                                                 counted(4, 75), counted(7, 60), counted(9, 0)};

    CHECK(select_receivers(traces, 4) == std::vector<int>{1, 2, 3, 4});
    CHECK(select_receivers(traces, 5) == std::vector<int>{1, 2, 3, 4, 7});
    CHECK(select_receivers(traces, 0) == std::vector<int>{1, 2, 3, 4, 7});  // 9 never captured

    try {
        (void)select_receivers(traces, 6);  // only 5 usable
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::TooFewUsableReceivers);
    }
    CHECK_THROWS_AS((void)select_receivers(traces, 2), Error);
    CHECK_THROWS_AS((void)select_receivers(traces, -1), Error);

    const std::vector<CumulativeTrace> sparse = {counted(1, 5), counted(2, 5), counted(3, 5),
                                                 counted(4, 0)};
    CHECK_THROWS_AS((void)select_receivers(sparse, 0), Error);
}

TEST_CASE("make_anchors pairs estimates with receiver centers by id") {
    const std::vector<Receiver> receivers = {{1, {0, 5, 0}, 1.0}, {2, {0, 0, 10}, 1.0}};
    std::vector<DistanceEstimate> ests(2);
    ests[0].receiver_id = 2;
    ests[0].distance = 9.5;
    ests[1].receiver_id = 1;
    ests[1].distance = 5.5;
    const std::vector<Anchor> anchors = make_anchors(receivers, ests);
    REQUIRE(anchors.size() == 2);
    CHECK(anchors[0].position.z == 10.0);
    CHECK(anchors[0].distance == 9.5);
    CHECK(anchors[1].position.y == 5.0);

    ests[1].receiver_id = 42;
    CHECK_THROWS_AS((void)make_anchors(receivers, ests), Error);
}

TEST_CASE("localize recovers the transmitter from noise-free traces") {
    Scenario big = oracles::detail::small_scenario().scenario();
    big.molecule_budget = 4000000;
    const ValidatedScenario scen = validate_scenario(big);
    const SamplingPlan plan{0.02, 100};
    const auto traces = oracles::detail::synthetic_traces(scen, plan, 0.8);

    LocalizeOptions opt;
    opt.subset_size = 0;
    const LocalizationResult res = localize(traces, scen, opt);
    CHECK(res.used_receiver_ids == std::vector<int>{1, 2, 3, 4});
    REQUIRE(res.estimates.size() == 4);
    for (const DistanceEstimate& est : res.estimates) CHECK(est.converged);
    CHECK(location_error(res.initial_position, big.transmitter) < 1e-2);
    CHECK(location_error(res.position, big.transmitter) < 1e-3);

    const std::vector<CumulativeTrace> three(traces.begin(), traces.begin() + 3);
    try {
        (void)localize(three, scen, opt);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::TooFewReceivers);
    }
}

TEST_CASE("best-subset initializer falls back past a rank-deficient face") {
    Scenario cube;
    cube.transmitter = {0, 40, 0};
    cube.receivers = {{1, {-10, 10, -10}, 4.0}, {2, {10, 10, -10}, 4.0}, {3, {10, 10, 10}, 4.0},
                      {4, {-10, 10, 10}, 4.0},  {5, {-10, -10, -10}, 4.0},
                      {6, {10, -10, -10}, 4.0}, {7, {10, -10, 10}, 4.0}, {8, {-10, -10, 10}, 4.0}};
    cube.medium = {100.0, {0, 0, 0}};
    cube.molecule_budget = 4000000;
    const ValidatedScenario scen = validate_scenario(cube);
    const auto traces = oracles::detail::synthetic_traces(scen, {0.02, 100}, 0.8);

    LocalizeOptions opt;
    opt.subset_size = 4;
    // The four highest-count receivers share the y=+10 plane. The seed is
    // solved inside that plane and lifted towards the side away from the
    // dropped receivers; the refinement stays on the selected four.
    const LocalizationResult res = localize(traces, scen, opt);
    CHECK(res.used_receiver_ids == std::vector<int>{1, 2, 3, 4});
    CHECK(res.initial_position.y > 10.0);
    CHECK(location_error(res.initial_position, cube.transmitter) < 0.1);
    CHECK(location_error(res.position, cube.transmitter) < 1e-3);

    // Off the cube axis the in-plane part of the seed must track the source.
    cube.transmitter = {3, 40, -2};
    const ValidatedScenario shifted = validate_scenario(cube);
    const auto shifted_traces = oracles::detail::synthetic_traces(shifted, {0.02, 100}, 0.8);
    const LocalizationResult res2 = localize(shifted_traces, shifted, opt);
    CHECK(res2.initial_position.y > 10.0);
    CHECK(location_error(res2.initial_position, cube.transmitter) < 0.5);
    CHECK(location_error(res2.position, cube.transmitter) < 1e-3);
}

TEST_CASE("an entirely coplanar receiver set still reports degenerate geometry") {
    Scenario flat;
    flat.transmitter = {0, 40, 0};
    flat.receivers = {{1, {-10, 10, -10}, 4.0}, {2, {10, 10, -10}, 4.0}, {3, {10, 10, 10}, 4.0},
                      {4, {-10, 10, 10}, 4.0}};
    flat.medium = {100.0, {0, 0, 0}};
    flat.molecule_budget = 4000000;
    const ValidatedScenario scen = validate_scenario(flat);
    const auto traces = oracles::detail::synthetic_traces(scen, {0.02, 100}, 0.8);

    LocalizeOptions opt;
    opt.subset_size = 0;
    try {
        (void)localize(traces, scen, opt);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Err::DegenerateGeometry);
    }
}

TEST_CASE("location error is the Euclidean distance") {
    CHECK(location_error({3, 4, 0}, {0, 0, 0}) == doctest::Approx(5.0));
    CHECK(location_error({1, 2, 3}, {1, 2, 3}) == 0.0);
}
