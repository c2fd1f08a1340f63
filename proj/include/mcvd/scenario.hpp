#pragma once

#include <cstdint>
#include <vector>

#include "mcvd/vec3.hpp"

namespace mcvd {

// Absorbing spherical receiver. Units: micrometers.
struct Receiver {
    int id = 0;
    Vec3 center{};
    double radius = 0.0;
};

// Unbounded medium with isotropic diffusion and a constant uniform drift.
// diffusion_coefficient in um^2/s, flow in um/s.
struct Medium {
    double diffusion_coefficient = 0.0;
    Vec3 flow{};
};

// Reporting grid: cumulative counts are recorded at t = n*sample_interval
// for n = 1..num_samples.
struct SamplingPlan {
    double sample_interval = 0.0;  // seconds
    int num_samples = 0;

    double total_time() const { return sample_interval * num_samples; }
};

struct Scenario {
    Vec3 transmitter{};
    std::vector<Receiver> receivers;
    Medium medium{};
    std::int64_t molecule_budget = 0;  // molecules released at t = 0
};

// A Scenario that passed validation, with center distances precomputed.
class ValidatedScenario {
  public:
    const Scenario& scenario() const { return scenario_; }
    const std::vector<Receiver>& receivers() const { return scenario_.receivers; }
    // Distance from the transmitter to receiver k's center (by list index).
    double true_distance(std::size_t k) const;
    const std::vector<double>& true_distances() const { return distances_; }

  private:
    friend ValidatedScenario validate_scenario(const Scenario&);
    Scenario scenario_;
    std::vector<double> distances_;
};

// Checks positivity, finiteness, unique receiver ids, pairwise receiver
// separation and that the transmitter lies outside every receiver.
ValidatedScenario validate_scenario(const Scenario& scenario);

// Checks sample_interval > 0 and num_samples >= 2.
void validate_plan(const SamplingPlan& plan);

}  // namespace mcvd
