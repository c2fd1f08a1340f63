#include "mcvd/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mcvd/errors.hpp"

namespace mcvd {
namespace {

constexpr double kMaxCondition = 1e10;

// Eigenvalues of a symmetric 3x3 matrix (row-major), analytic form,
// ascending order.
void eigenvalues_sym3(const double n[9], double out[3]) {
    const double p1 = n[1] * n[1] + n[2] * n[2] + n[5] * n[5];
    if (p1 == 0.0) {
        out[0] = n[0];
        out[1] = n[4];
        out[2] = n[8];
        std::sort(out, out + 3);
        return;
    }
    const double q = (n[0] + n[4] + n[8]) / 3.0;
    const double p2 = (n[0] - q) * (n[0] - q) + (n[4] - q) * (n[4] - q) +
                      (n[8] - q) * (n[8] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const double b00 = (n[0] - q) / p, b01 = n[1] / p, b02 = n[2] / p;
    const double b11 = (n[4] - q) / p, b12 = n[5] / p, b22 = (n[8] - q) / p;
    const double det_b = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                         b02 * (b01 * b12 - b11 * b02);
    const double r = std::clamp(det_b / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double two_thirds_pi = 2.0 * std::numbers::pi / 3.0;
    out[2] = q + 2.0 * p * std::cos(phi);
    out[0] = q + 2.0 * p * std::cos(phi + two_thirds_pi);
    out[1] = 3.0 * q - out[0] - out[2];
}

Vec3 solve_sym3(const double n[9], const Vec3& rhs) {
    const double det = n[0] * (n[4] * n[8] - n[5] * n[5]) -
                       n[1] * (n[1] * n[8] - n[5] * n[2]) +
                       n[2] * (n[1] * n[5] - n[4] * n[2]);
    if (!(std::fabs(det) > 0.0) || !std::isfinite(det))
        fail(Err::DegenerateGeometry, "normal matrix is singular");
    const double inv = 1.0 / det;
    const double c00 = n[4] * n[8] - n[5] * n[5];
    const double c01 = n[2] * n[5] - n[1] * n[8];
    const double c02 = n[1] * n[5] - n[2] * n[4];
    const double c11 = n[0] * n[8] - n[2] * n[2];
    const double c12 = n[2] * n[1] - n[0] * n[5];
    const double c22 = n[0] * n[4] - n[1] * n[1];
    return Vec3{inv * (c00 * rhs.x + c01 * rhs.y + c02 * rhs.z),
                inv * (c01 * rhs.x + c11 * rhs.y + c12 * rhs.z),
                inv * (c02 * rhs.x + c12 * rhs.y + c22 * rhs.z)};
}

void check_anchors(std::span<const Anchor> anchors) {
    for (const Anchor& a : anchors) {
        if (!a.position.is_finite() || !std::isfinite(a.distance) || !(a.distance > 0.0))
            fail(Err::InvalidArgument,
                 "anchor " + std::to_string(a.receiver_id) + " needs a finite position and d > 0");
    }
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Seed for a rank-deficient subset, e.g. one cube face seen from a source on
// the cube axis. The linearized system cannot fix the coordinate normal to
// the anchor plane, so solve the differenced system inside the plane, lift by
// the shared offset sqrt(d^2 - rho^2), and take the side facing away from the
// receivers the selection dropped: they captured less, so the source is on
// the opposite side of the plane.
Vec3 coplanar_seed(std::span<const Anchor> anchors, std::span<const Receiver> receivers,
                   const std::vector<int>& dropped_ids) {
    if (dropped_ids.empty())
        fail(Err::DegenerateGeometry,
             "anchor geometry is rank-deficient (centers nearly coplanar)");

    Vec3 centroid{};
    for (const Anchor& a : anchors) centroid += a.position;
    centroid = centroid * (1.0 / static_cast<double>(anchors.size()));

    double scale2 = 0.0;
    Vec3 u{};
    for (const Anchor& a : anchors) {
        const Vec3 off = a.position - centroid;
        if (off.norm_squared() > scale2) {
            scale2 = off.norm_squared();
            u = off;
        }
    }
    u = u * (1.0 / u.norm());
    double best = 0.0;
    Vec3 v{};
    for (const Anchor& a : anchors) {
        const Vec3 off = a.position - centroid;
        const Vec3 rej = off - u * dot(off, u);
        if (rej.norm_squared() > best) {
            best = rej.norm_squared();
            v = rej;
        }
    }
    if (!(best > 1e-18 * scale2))
        fail(Err::DegenerateGeometry, "anchor centers are nearly collinear");
    v = v * (1.0 / v.norm());
    Vec3 n = cross(u, v);
    n = n * (1.0 / n.norm());

    // Differenced trilateration restricted to the plane, in (u, v) coordinates.
    const Anchor& ref = anchors.back();
    const double qr_u = dot(ref.position - centroid, u);
    const double qr_v = dot(ref.position - centroid, v);
    double m00 = 0.0, m01 = 0.0, m11 = 0.0, r0 = 0.0, r1 = 0.0;
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        const Vec3 off = anchors[i].position - centroid;
        const double q_u = dot(off, u);
        const double q_v = dot(off, v);
        const double g0 = 2.0 * (qr_u - q_u);
        const double g1 = 2.0 * (qr_v - q_v);
        const double b = anchors[i].distance * anchors[i].distance -
                         ref.distance * ref.distance - (q_u * q_u + q_v * q_v) +
                         (qr_u * qr_u + qr_v * qr_v);
        m00 += g0 * g0;
        m01 += g0 * g1;
        m11 += g1 * g1;
        r0 += g0 * b;
        r1 += g1 * b;
    }
    const double det = m00 * m11 - m01 * m01;
    if (!(std::fabs(det) > 0.0) || !std::isfinite(det))
        fail(Err::DegenerateGeometry, "in-plane normal matrix is singular");
    const double xi = (m11 * r0 - m01 * r1) / det;
    const double eta = (m00 * r1 - m01 * r0) / det;

    double h2 = 0.0;
    for (const Anchor& a : anchors) {
        const Vec3 off = a.position - centroid;
        const double du = xi - dot(off, u);
        const double dv = eta - dot(off, v);
        h2 += a.distance * a.distance - du * du - dv * dv;
    }
    const double h = std::sqrt(std::max(0.0, h2 / static_cast<double>(anchors.size())));

    Vec3 dropped_mean{};
    for (int id : dropped_ids) {
        for (const Receiver& rx : receivers)
            if (rx.id == id) dropped_mean += rx.center;
    }
    dropped_mean = dropped_mean * (1.0 / static_cast<double>(dropped_ids.size()));
    const double side = dot(centroid - dropped_mean, n) >= 0.0 ? 1.0 : -1.0;
    return centroid + u * xi + v * eta + n * (side * h);
}

}  // namespace

double objective_H(const Vec3& p, std::span<const Anchor> anchors) {
    double h = 0.0;
    for (const Anchor& a : anchors) {
        const double g = distance_squared(p, a.position) - a.distance * a.distance;
        h += g * g;
    }
    return h;
}

Vec3 gradient_H(const Vec3& p, std::span<const Anchor> anchors) {
    Vec3 grad{};
    for (const Anchor& a : anchors) {
        const double g = distance_squared(p, a.position) - a.distance * a.distance;
        grad.x += 4.0 * g * (p.x - a.position.x);
        grad.y += 4.0 * g * (p.y - a.position.y);
        grad.z += 4.0 * g * (p.z - a.position.z);
    }
    return grad;
}

Vec3 multilaterate_init(std::span<const Anchor> anchors) {
    if (anchors.size() < 4)
        fail(Err::TooFewReceivers,
             "multilateration needs at least 4 anchors, got " + std::to_string(anchors.size()));
    check_anchors(anchors);

    const Anchor& ref = anchors.back();
    const double m_ref = ref.position.norm_squared();

    // Accumulate A'A and A'b directly; A has rows 2 (p_ref - p_i).
    double n[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    Vec3 rhs{};
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        const Anchor& a = anchors[i];
        const Vec3 row{2.0 * (ref.position.x - a.position.x),
                       2.0 * (ref.position.y - a.position.y),
                       2.0 * (ref.position.z - a.position.z)};
        const double b = m_ref - a.position.norm_squared() + a.distance * a.distance -
                         ref.distance * ref.distance;
        n[0] += row.x * row.x;
        n[1] += row.x * row.y;
        n[2] += row.x * row.z;
        n[4] += row.y * row.y;
        n[5] += row.y * row.z;
        n[8] += row.z * row.z;
        rhs.x += row.x * b;
        rhs.y += row.y * b;
        rhs.z += row.z * b;
    }
    n[3] = n[1];
    n[6] = n[2];
    n[7] = n[5];

    double eig[3];
    eigenvalues_sym3(n, eig);
    if (!(eig[0] > 0.0) || eig[2] > kMaxCondition * eig[0])
        fail(Err::DegenerateGeometry,
             "anchor geometry is rank-deficient (centers nearly coplanar)");
    return solve_sym3(n, rhs);
}

SdResult steepest_descent(const Vec3& start, std::span<const Anchor> anchors,
                          const SdOptions& options) {
    if (anchors.empty()) fail(Err::InvalidArgument, "no anchors");
    check_anchors(anchors);
    if (!start.is_finite()) fail(Err::InvalidArgument, "non-finite start point");
    if (!(options.backtrack > 0.0) || !(options.backtrack < 1.0))
        fail(Err::InvalidArgument, "backtrack factor must lie in (0, 1)");

    double d2_sum = 0.0;
    for (const Anchor& a : anchors) d2_sum += a.distance * a.distance;
    const double step0 = 1.0 / (4.0 * d2_sum);
    const double grad_tol = options.grad_tol_scale * d2_sum * std::sqrt(d2_sum);

    SdResult out;
    out.position = start;
    out.objective = objective_H(start, anchors);
    while (out.iterations < options.max_iters) {
        const Vec3 grad = gradient_H(out.position, anchors);
        if (grad.norm() <= grad_tol) {
            out.converged = true;
            break;
        }
        double step = step0;
        bool improved = false;
        while (step >= options.min_step) {
            const Vec3 cand{out.position.x - step * grad.x, out.position.y - step * grad.y,
                            out.position.z - step * grad.z};
            const double h = objective_H(cand, anchors);
            if (h < out.objective) {
                out.position = cand;
                out.objective = h;
                improved = true;
                break;
            }
            step *= options.backtrack;
        }
        ++out.iterations;
        if (!improved) break;  // line search underflowed; best iterate stands
    }
    return out;
}

std::vector<int> select_receivers(std::span<const CumulativeTrace> traces, int subset_size) {
    if (subset_size != 0 && subset_size < 4)
        fail(Err::InvalidArgument, "subset size must be 0 (all) or >= 4");

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < traces.size(); ++i)
        if (traces[i].final_count() > 0) usable.push_back(i);

    const std::size_t want = subset_size == 0 ? usable.size() : static_cast<std::size_t>(subset_size);
    if (usable.size() < want || usable.size() < 4)
        fail(Err::TooFewUsableReceivers,
             "need " + std::to_string(std::max<std::size_t>(want, 4)) +
                 " receivers with captures, have " + std::to_string(usable.size()));

    std::sort(usable.begin(), usable.end(), [&](std::size_t a, std::size_t b) {
        if (traces[a].final_count() != traces[b].final_count())
            return traces[a].final_count() > traces[b].final_count();
        return traces[a].receiver_id < traces[b].receiver_id;
    });
    usable.resize(want);

    std::vector<int> ids;
    ids.reserve(usable.size());
    for (std::size_t i : usable) ids.push_back(traces[i].receiver_id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

LocalizationResult localize(std::span<const CumulativeTrace> traces,
                            const ValidatedScenario& scenario,
                            const LocalizeOptions& options) {
    if (traces.size() < 4)
        fail(Err::TooFewReceivers,
             "localization needs at least 4 receivers, got " + std::to_string(traces.size()));
    const Scenario& scen = scenario.scenario();

    const std::vector<int> ids = select_receivers(traces, options.subset_size);

    LocalizationResult out;
    out.used_receiver_ids = ids;
    out.estimates.reserve(ids.size());
    for (int id : ids) {
        const CumulativeTrace* trace = nullptr;
        const Receiver* receiver = nullptr;
        for (const CumulativeTrace& t : traces)
            if (t.receiver_id == id) trace = &t;
        for (const Receiver& r : scen.receivers)
            if (r.id == id) receiver = &r;
        if (trace == nullptr || receiver == nullptr)
            fail(Err::InvalidArgument, "trace/receiver id mismatch for id " + std::to_string(id));
        ModelContext ctx{static_cast<double>(scen.molecule_budget), receiver->radius,
                         scen.medium.diffusion_coefficient, trace->sample_times};
        out.estimates.push_back(estimate_distance(*trace, ctx, options.fit));
    }

    const std::vector<Anchor> anchors = make_anchors(scen.receivers, out.estimates);
    try {
        out.initial_position = multilaterate_init(anchors);
    } catch (const Error& e) {
        if (e.code() != Err::DegenerateGeometry) throw;
        std::vector<int> dropped;
        for (int id : select_receivers(traces, 0))
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) dropped.push_back(id);
        out.initial_position = coplanar_seed(anchors, scen.receivers, dropped);
    }
    const SdResult sd = steepest_descent(out.initial_position, anchors, options.sd);
    out.position = sd.position;
    out.objective = sd.objective;
    out.sd_iterations = sd.iterations;
    out.converged = sd.converged;
    return out;
}

std::vector<Anchor> make_anchors(std::span<const Receiver> receivers,
                                 std::span<const DistanceEstimate> estimates) {
    std::vector<Anchor> out;
    out.reserve(estimates.size());
    for (const DistanceEstimate& est : estimates) {
        const Receiver* match = nullptr;
        for (const Receiver& rx : receivers) {
            if (rx.id == est.receiver_id) {
                match = &rx;
                break;
            }
        }
        if (match == nullptr)
            fail(Err::InvalidArgument,
                 "estimate references unknown receiver id " + std::to_string(est.receiver_id));
        out.push_back({match->center, est.distance, est.receiver_id});
    }
    return out;
}

double location_error(const Vec3& estimated, const Vec3& actual) {
    return distance(estimated, actual);
}

}  // namespace mcvd
