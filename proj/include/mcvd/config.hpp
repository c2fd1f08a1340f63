#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mcvd/particle_sim.hpp"
#include "mcvd/scenario.hpp"

namespace mcvd {

enum class SweepAxis {
    None,
    Radius,          // receiver radius, all receivers
    Budget,          // molecules released
    Diffusion,       // diffusion coefficient
    FlowY,           // flow = (0, v, 0)
    TnY,             // transmitter at (0, v, 0); tn_positions is ignored
    SampleInterval,  // re-binned from one event set per trial
    SubsetSize,      // receivers used in localization, from one event set
    Topology,        // receiver centers scaled by the value
};

struct ProbMapSpec {
    bool present = false;
    double x0 = 0.0, x1 = 0.0;
    int nx = 0;
    double y0 = 0.0, y1 = 0.0;
    int ny = 0;
    double z = 0.0;
    int trials = 20;
};

// Everything a run needs, read from one flat key=value file.
struct RunConfig {
    Scenario scenario;
    SamplingPlan plan;
    double sim_step = 1e-4;
    AbsorptionPolicy policy = AbsorptionPolicy::EndOfStep;
    std::uint64_t seed = 1;
    int trials = 1;
    int subset_size = 4;

    SweepAxis sweep_axis = SweepAxis::None;
    std::vector<double> sweep_values;
    std::vector<Vec3> tn_positions;  // secondary sweep dimension (default: scenario TN)
    ProbMapSpec map;

    std::string hash;  // FNV-1a of the raw config text, 16 hex digits
};

// FNV-1a 64-bit over bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Strict parser: unknown keys, malformed numbers, wrong arity and duplicate
// scalar keys are ConfigParse errors. Line comments start with '#'.
RunConfig parse_config(std::string_view text);

// Reads the file and parses it; Io on read failure.
RunConfig load_config(const std::string& path);

}  // namespace mcvd
