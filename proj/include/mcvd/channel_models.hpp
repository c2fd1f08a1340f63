#pragma once

#include <array>
#include <vector>

#include "mcvd/trace.hpp"

namespace mcvd {

// Complementary error function, accurate to ~1e-14 absolute over the reals.
// Power series below |x| = 2.5, Lentz continued fraction above.
double erfc(double x);

// Channel constants shared by the closed-form model and the fitter.
// sample_times (strictly increasing) pins the grid a trace must live on;
// leave it empty for single-time evaluations.
struct ModelContext {
    double molecule_budget = 0.0;       // Q
    double receiver_radius = 0.0;       // rho
    double diffusion_coefficient = 0.0; // D
    std::vector<double> sample_times;
};

// Expected cumulative absorbed count at time t for a lone absorbing sphere
// at center distance d from an impulsive point release:
//   F(d, t) = Q * (rho/d) * erfc((d - rho) / sqrt(4 D t)).
double siso_cumulative(const ModelContext& ctx, double d, double t);

// Fit model for one receiver in a multi-receiver deployment: a gain factor
// absorbs the molecules lost to the other receivers.
struct FitParams {
    double gain = 0.0;      // a in [0, 1] for physical fits
    double distance = 0.0;  // d
};

double fit_model(const FitParams& p, const ModelContext& ctx, double t);

// Partial derivatives (df/d gain, df/d distance) of fit_model at (p, t).
std::array<double, 2> fit_model_jacobian(const FitParams& p, const ModelContext& ctx, double t);

// Observed-minus-model residuals on the probability scale:
//   res[n] = (counts[n] - fit_model(p, t_n)) / Q.
// The trace must sit on ctx.sample_times exactly.
std::vector<double> residuals(const FitParams& p, const ModelContext& ctx,
                              const CumulativeTrace& trace);

}  // namespace mcvd
