#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mcvd {

// Residual vector r(beta), length m. Jacobian J(beta), row-major m x p with
// J[i*p + j] = d r_i / d beta_j.
using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;
using JacobianFn = std::function<std::vector<double>(std::span<const double>)>;

struct LmOptions {
    double mu0_scale = 1e-3;    // mu0 = mu0_scale * mean(diag(J'J)) at beta0
    double growth = 10.0;       // damping growth/shrink factor
    double step_tol = 1e-8;     // stop when ||delta|| <= step_tol
    int max_iters = 200;
    int max_rejections = 50;    // consecutive rejected steps before giving up
};

struct LmResult {
    std::vector<double> beta;
    double sse = 0.0;  // sum of squared residuals at beta
    int iterations = 0;
    bool converged = false;
    std::vector<double> trajectory;  // SSR after each iteration (non-increasing)
};

// Solves [J'J + mu I] delta = -J' r for the damped Gauss-Newton step.
// jacobian is row-major m x p. Throws SingularSystem when the damped normal
// matrix cannot be factored (non-finite entries or zero pivot).
std::vector<double> solve_damped_step(std::span<const double> jacobian,
                                      std::size_t m, std::size_t p,
                                      std::span<const double> residual, double mu);

// Damped least squares with the accept/reject damping schedule: shrink mu by
// `growth` on improvement, grow it and retry the same linearization otherwise.
// The step-norm test runs before the accept test. Throws NonFiniteResidual if
// the initial point (or an accepted point's jacobian) is non-finite; a
// non-finite candidate during the search counts as a rejected step.
LmResult lm_minimize(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                     std::span<const double> beta0, const LmOptions& opts = {});

}  // namespace mcvd
