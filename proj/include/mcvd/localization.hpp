#pragma once

#include <span>
#include <vector>

#include "mcvd/distance_estimation.hpp"
#include "mcvd/scenario.hpp"
#include "mcvd/trace.hpp"
#include "mcvd/vec3.hpp"

namespace mcvd {

// One receiver's contribution to localization: where it sits and how far the
// transmitter is estimated to be from it.
struct Anchor {
    Vec3 position{};
    double distance = 0.0;
    int receiver_id = 0;
};

// Squared-range objective H(p) = sum_k (||p - p_k||^2 - d_k^2)^2.
double objective_H(const Vec3& p, std::span<const Anchor> anchors);

// Gradient of H: sum_k 4 (||p - p_k||^2 - d_k^2) (p - p_k).
Vec3 gradient_H(const Vec3& p, std::span<const Anchor> anchors);

// Linear least-squares seed from pairwise-differenced range equations, with
// the last anchor as reference. Needs >= 4 anchors; throws DegenerateGeometry
// when the anchor geometry leaves the normal matrix ill-conditioned.
Vec3 multilaterate_init(std::span<const Anchor> anchors);

struct SdOptions {
    int max_iters = 500;
    double backtrack = 0.5;        // step-halving factor in the line search
    double grad_tol_scale = 1e-9;  // tolerance = scale * (sum d_k^2)^1.5
    double min_step = 1e-15;
};

struct SdResult {
    Vec3 position{};
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Steepest descent on H with a backtracking line search. The initial probe
// step 1/(4 sum d_k^2) cancels the objective's quartic growth, so the first
// probe lands near the right scale for any unit system.
SdResult steepest_descent(const Vec3& start, std::span<const Anchor> anchors,
                          const SdOptions& options = {});

// Ids of the subset_size receivers with the highest final cumulative counts;
// ties go to the lower receiver id. subset_size 0 keeps every receiver that
// captured anything. Zero-count receivers are never selected.
std::vector<int> select_receivers(std::span<const CumulativeTrace> traces, int subset_size);

struct LocalizeOptions {
    int subset_size = 4;  // 0 keeps all usable receivers; otherwise >= 4
    EstimateOptions fit{};
    SdOptions sd{};
};

struct LocalizationResult {
    Vec3 initial_position{};  // multilateration seed
    Vec3 position{};          // refined estimate
    double objective = 0.0;
    int sd_iterations = 0;
    bool converged = false;
    std::vector<int> used_receiver_ids;
    std::vector<DistanceEstimate> estimates;  // one per used receiver
};

// Full per-trial pipeline: select receivers by final count, fit each selected
// trace for a distance, seed by multilateration, refine by steepest descent.
LocalizationResult localize(std::span<const CumulativeTrace> traces,
                            const ValidatedScenario& scenario,
                            const LocalizeOptions& options = {});

// Pairs receivers with their distance estimates (matched by receiver id).
std::vector<Anchor> make_anchors(std::span<const Receiver> receivers,
                                 std::span<const DistanceEstimate> estimates);

// Euclidean distance between estimated and actual transmitter positions.
double location_error(const Vec3& estimated, const Vec3& actual);

}  // namespace mcvd
