#include "mcvd/channel_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mcvd/errors.hpp"

namespace mcvd {
namespace {

constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;

// erf(x) = (2/sqrt(pi)) x e^{-x^2} sum_n (2x^2)^n / (1*3*...*(2n+1)).
// All terms positive, so no cancellation on [0, 2.5).
double erf_series(double x) {
    const double x2 = 2.0 * x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= x2 / (2.0 * n + 1.0);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return kTwoOverSqrtPi * std::exp(-x * x) * sum;
}

// sqrt(pi) e^{x^2} erfc(x) = 1/(x+ (1/2)/(x+ 1/(x+ (3/2)/(x+ ...)))),
// evaluated with the modified Lentz scheme. Valid for x >= 2.5.
double erfc_fraction(double x) {
    constexpr double tiny = 1e-300;
    double f = tiny;
    double c = f;
    double d = 0.0;
    for (int n = 1; n < 200; ++n) {
        const double a = n == 1 ? 1.0 : (n - 1) * 0.5;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return f;
}

void check_context(const ModelContext& ctx) {
    if (!(ctx.molecule_budget > 0.0) || !(ctx.receiver_radius > 0.0) ||
        !(ctx.diffusion_coefficient >= 0.0))
        fail(Err::NonPositiveParameter,
             "model context requires budget > 0, radius > 0, diffusion >= 0");
}

double spread_at(const ModelContext& ctx, double t) {
    return std::sqrt(4.0 * ctx.diffusion_coefficient * t);
}

double scaled_gap(double d, double r, double spread) {
    if (spread > 0.0) return (d - r) / spread;
    return d == r ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

double erfc(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x < 2.5) return 1.0 - erf_series(x);
    if (x > 27.5) return 0.0;  // exp(-x^2) underflows
    return std::exp(-x * x) * std::numbers::inv_sqrtpi * erfc_fraction(x);
}

double siso_cumulative(const ModelContext& ctx, double d, double t) {
    check_context(ctx);
    if (!(t > 0.0)) fail(Err::InvalidArgument, "time must be > 0");
    if (!(d >= ctx.receiver_radius))
        fail(Err::DistanceInsideReceiver,
             "distance " + std::to_string(d) + " below receiver radius");
    const double u = scaled_gap(d, ctx.receiver_radius, spread_at(ctx, t));
    return ctx.molecule_budget * (ctx.receiver_radius / d) * erfc(u);
}

double fit_model(const FitParams& p, const ModelContext& ctx, double t) {
    return p.gain * siso_cumulative(ctx, p.distance, t);
}

std::array<double, 2> fit_model_jacobian(const FitParams& p, const ModelContext& ctx, double t) {
    check_context(ctx);
    if (!(t > 0.0)) fail(Err::InvalidArgument, "time must be > 0");
    const double d = p.distance;
    if (!(d >= ctx.receiver_radius))
        fail(Err::DistanceInsideReceiver,
             "distance " + std::to_string(d) + " below receiver radius");
    const double q = ctx.molecule_budget;
    const double r = ctx.receiver_radius;
    const double spread = spread_at(ctx, t);
    const double u = scaled_gap(d, r, spread);
    const double ef = erfc(u);
    const double df_dgain = q * (r / d) * ef;
    double df_ddist = 0.0;
    if (spread > 0.0) {
        const double gauss = std::exp(-u * u);
        df_ddist = p.gain * q * r * (-ef / (d * d) - kTwoOverSqrtPi * gauss / (d * spread));
    }
    return {df_dgain, df_ddist};
}

std::vector<double> residuals(const FitParams& p, const ModelContext& ctx,
                              const CumulativeTrace& trace) {
    if (trace.sample_times.size() != trace.counts.size())
        fail(Err::LengthMismatch, "trace times and counts differ in length");
    if (trace.sample_times.empty())
        fail(Err::InvalidArgument, "empty trace");
    if (ctx.sample_times.size() != trace.sample_times.size())
        fail(Err::LengthMismatch, "trace does not sit on the context sampling grid");
    for (std::size_t n = 0; n < trace.sample_times.size(); ++n) {
        const double want = ctx.sample_times[n];
        if (std::fabs(trace.sample_times[n] - want) > 1e-12 * std::max(1.0, std::fabs(want)))
            fail(Err::LengthMismatch, "trace does not sit on the context sampling grid");
    }
    std::vector<double> out(trace.counts.size());
    for (std::size_t n = 0; n < out.size(); ++n) {
        const double fit = fit_model(p, ctx, trace.sample_times[n]);
        out[n] = (static_cast<double>(trace.counts[n]) - fit) / ctx.molecule_budget;
    }
    return out;
}

}  // namespace mcvd
