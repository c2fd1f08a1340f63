#include "mcvd/lm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcvd/errors.hpp"

namespace mcvd {
namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double sse_of(std::span<const double> r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    return s;
}

// In-place Gaussian elimination with partial pivoting; a is p x p row-major.
void solve_inplace(std::vector<double>& a, std::vector<double>& b, std::size_t p) {
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < p; ++row)
            if (std::fabs(a[row * p + col]) > std::fabs(a[pivot * p + col])) pivot = row;
        if (!(std::fabs(a[pivot * p + col]) > 0.0))
            fail(Err::SingularSystem, "damped normal matrix has a zero pivot");
        if (pivot != col) {
            for (std::size_t j = 0; j < p; ++j) std::swap(a[col * p + j], a[pivot * p + j]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * p + col];
        for (std::size_t row = col + 1; row < p; ++row) {
            const double factor = a[row * p + col] * inv;
            if (factor == 0.0) continue;
            for (std::size_t j = col; j < p; ++j) a[row * p + j] -= factor * a[col * p + j];
            b[row] -= factor * b[col];
        }
    }
    for (std::size_t row = p; row-- > 0;) {
        double s = b[row];
        for (std::size_t j = row + 1; j < p; ++j) s -= a[row * p + j] * b[j];
        b[row] = s / a[row * p + row];
    }
}

std::vector<double> normal_diag(std::span<const double> jac, std::size_t m, std::size_t p) {
    std::vector<double> diag(p, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            const double v = jac[i * p + j];
            diag[j] += v * v;
        }
    return diag;
}

}  // namespace

std::vector<double> solve_damped_step(std::span<const double> jacobian,
                                      std::size_t m, std::size_t p,
                                      std::span<const double> residual, double mu) {
    if (jacobian.size() != m * p || residual.size() != m)
        fail(Err::LengthMismatch, "jacobian/residual dimensions disagree");
    if (p == 0 || m == 0) fail(Err::InvalidArgument, "empty system");
    if (!all_finite(jacobian) || !all_finite(residual) || !std::isfinite(mu))
        fail(Err::SingularSystem, "non-finite entries in damped system");

    std::vector<double> a(p * p, 0.0);
    std::vector<double> b(p, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = jacobian.data() + i * p;
        for (std::size_t j = 0; j < p; ++j) {
            b[j] -= row[j] * residual[i];
            for (std::size_t k = j; k < p; ++k) a[j * p + k] += row[j] * row[k];
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        a[j * p + j] += mu;
        for (std::size_t k = 0; k < j; ++k) a[j * p + k] = a[k * p + j];
    }
    solve_inplace(a, b, p);
    if (!all_finite(b)) fail(Err::SingularSystem, "damped step is non-finite");
    return b;
}

LmResult lm_minimize(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                     std::span<const double> beta0, const LmOptions& opts) {
    if (beta0.empty()) fail(Err::InvalidArgument, "empty initial point");
    const std::size_t p = beta0.size();

    std::vector<double> beta(beta0.begin(), beta0.end());
    std::vector<double> res = residual_fn(beta);
    if (res.empty() || !all_finite(res))
        fail(Err::NonFiniteResidual, "residual non-finite at the initial point");
    const std::size_t m = res.size();
    std::vector<double> jac = jacobian_fn(beta);
    if (jac.size() != m * p || !all_finite(jac))
        fail(Err::NonFiniteResidual, "jacobian non-finite at the initial point");

    const std::vector<double> diag = normal_diag(jac, m, p);
    double diag_mean = 0.0;
    for (double v : diag) diag_mean += v;
    diag_mean /= static_cast<double>(p);
    double mu = opts.mu0_scale * (diag_mean > 0.0 ? diag_mean : 1.0);

    LmResult out;
    out.sse = sse_of(res);
    int rejections = 0;
    std::vector<double> cand(p);

    while (out.iterations < opts.max_iters) {
        ++out.iterations;
        const std::vector<double> delta = solve_damped_step(jac, m, p, res, mu);
        double step_norm = 0.0;
        for (double v : delta) step_norm += v * v;
        if (std::sqrt(step_norm) <= opts.step_tol) {
            out.converged = true;
            break;
        }
        for (std::size_t j = 0; j < p; ++j) cand[j] = beta[j] + delta[j];
        const std::vector<double> cres = residual_fn(cand);
        const double csse =
            (cres.size() == m && all_finite(cres)) ? sse_of(cres) : std::numeric_limits<double>::infinity();
        if (csse < out.sse) {
            beta = cand;
            res = cres;
            out.sse = csse;
            jac = jacobian_fn(beta);
            if (jac.size() != m * p || !all_finite(jac))
                fail(Err::NonFiniteResidual, "jacobian non-finite at an accepted point");
            mu = std::max(mu / opts.growth, 1e-300);
            rejections = 0;
        } else {
            mu *= opts.growth;
            if (++rejections >= opts.max_rejections) break;
        }
        out.trajectory.push_back(out.sse);
    }
    out.beta = std::move(beta);
    return out;
}

}  // namespace mcvd
