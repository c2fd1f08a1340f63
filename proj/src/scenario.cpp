#include "mcvd/scenario.hpp"

#include <cmath>
#include <set>
#include <string>

#include "mcvd/errors.hpp"

namespace mcvd {

double ValidatedScenario::true_distance(std::size_t k) const {
    if (k >= distances_.size())
        fail(Err::IndexOutOfRange,
             "receiver index " + std::to_string(k) + " out of range (K=" +
                 std::to_string(distances_.size()) + ")");
    return distances_[k];
}

ValidatedScenario validate_scenario(const Scenario& scenario) {
    if (scenario.molecule_budget <= 0)
        fail(Err::NonPositiveParameter, "molecule budget must be > 0");
    if (!(scenario.medium.diffusion_coefficient >= 0.0))
        fail(Err::NonPositiveParameter, "diffusion coefficient must be >= 0");
    if (!scenario.transmitter.is_finite() || !scenario.medium.flow.is_finite())
        fail(Err::InvalidArgument, "transmitter and flow must be finite");
    if (scenario.receivers.empty())
        fail(Err::InvalidArgument, "scenario needs at least one receiver");

    std::set<int> ids;
    for (const Receiver& rx : scenario.receivers) {
        if (!(rx.radius > 0.0) || !std::isfinite(rx.radius))
            fail(Err::NonPositiveParameter,
                 "receiver " + std::to_string(rx.id) + " radius must be > 0");
        if (!rx.center.is_finite())
            fail(Err::InvalidArgument,
                 "receiver " + std::to_string(rx.id) + " center must be finite");
        if (!ids.insert(rx.id).second)
            fail(Err::InvalidArgument,
                 "duplicate receiver id " + std::to_string(rx.id));
    }

    const auto& rxs = scenario.receivers;
    for (std::size_t i = 0; i < rxs.size(); ++i) {
        for (std::size_t j = i + 1; j < rxs.size(); ++j) {
            const double gap = rxs[i].radius + rxs[j].radius;
            if (distance_squared(rxs[i].center, rxs[j].center) <= gap * gap)
                fail(Err::OverlappingReceivers,
                     "receivers " + std::to_string(rxs[i].id) + " and " +
                         std::to_string(rxs[j].id) + " overlap");
        }
    }

    ValidatedScenario out;
    out.scenario_ = scenario;
    out.distances_.reserve(rxs.size());
    for (const Receiver& rx : rxs) {
        const double d = distance(scenario.transmitter, rx.center);
        if (d <= rx.radius)
            fail(Err::TransmitterInsideReceiver,
                 "transmitter lies inside receiver " + std::to_string(rx.id));
        out.distances_.push_back(d);
    }
    return out;
}

void validate_plan(const SamplingPlan& plan) {
    if (!(plan.sample_interval > 0.0) || !std::isfinite(plan.sample_interval))
        fail(Err::NonPositiveParameter, "sample interval must be > 0");
    if (plan.num_samples < 2)
        fail(Err::InvalidArgument, "need at least two samples per trace");
}

}  // namespace mcvd
