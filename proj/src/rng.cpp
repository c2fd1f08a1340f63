#include "mcvd/rng.hpp"

#include <cmath>

namespace mcvd {
namespace {

// 128-layer ziggurat constants (Marsaglia & Tsang layout, Doornik's tables).
constexpr int kLayers = 128;
constexpr double kR = 3.442619855899;       // start of the tail
constexpr double kV = 9.91256303526217e-3;  // area of each layer

struct ZigguratTables {
    double x[kLayers + 1];
    double ratio[kLayers];

    ZigguratTables() {
        double f = std::exp(-0.5 * kR * kR);
        x[0] = kV / f;  // pseudo-base: layer 0 plus the tail share area kV
        x[1] = kR;
        x[kLayers] = 0.0;
        for (int i = 2; i < kLayers; ++i) {
            x[i] = std::sqrt(-2.0 * std::log(kV / x[i - 1] + f));
            f = std::exp(-0.5 * x[i] * x[i]);
        }
        for (int i = 0; i < kLayers; ++i) ratio[i] = x[i + 1] / x[i];
    }
};

const ZigguratTables& tables() {
    static const ZigguratTables t;
    return t;
}

}  // namespace

double NormalSampler::normal() {
    const ZigguratTables& t = tables();
    for (;;) {
        const double u = 2.0 * rng_.uniform01() - 1.0;
        const unsigned i = static_cast<unsigned>(rng_.next() & (kLayers - 1));
        if (std::fabs(u) < t.ratio[i]) return u * t.x[i];
        if (i == 0) return tail(u < 0.0);
        // Wedge between x[i+1] and x[i]: accept against the true density.
        const double xx = u * t.x[i];
        const double f0 = std::exp(-0.5 * (t.x[i] * t.x[i] - xx * xx));
        const double f1 = std::exp(-0.5 * (t.x[i + 1] * t.x[i + 1] - xx * xx));
        if (f1 + rng_.uniform01() * (f0 - f1) < 1.0) return xx;
    }
}

double NormalSampler::tail(bool negative) {
    // Marsaglia's exact tail sampler for |X| > kR.
    double x, y;
    do {
        x = std::log(rng_.uniform01()) / kR;
        y = std::log(rng_.uniform01());
    } while (-2.0 * y < x * x);
    return negative ? x - kR : kR - x;
}

}  // namespace mcvd
