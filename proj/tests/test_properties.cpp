#include <string>

#include "doctest.h"
#include "oracles.hpp"

// Each battery item checks one invariant the library is supposed to hold
// regardless of parameters: conservation, determinism, reference math,
// solver descent, and end-to-end recovery on synthetic data.
TEST_CASE("property battery") {
    const std::vector<oracles::PropertyOutcome> outcomes = oracles::run_property_battery();
    REQUIRE(!outcomes.empty());
    for (const oracles::PropertyOutcome& item : outcomes) {
        INFO(item.name, ": ", item.detail);
        CHECK(item.pass);
    }
}
