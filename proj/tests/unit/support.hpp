#pragma once
// Shared fixtures: the default scenario and its generated reference profile.

#include <memory>

#include "entry/reference.hpp"
#include "entry/scenario.hpp"
#include "entry/sim.hpp"

namespace entry::test {

const ScenarioConfig& scenario();

/// Generated once per process from the default scenario.
const RefgenResult& nominal_reference();
std::shared_ptr<const ReferenceProfile> nominal_profile();

/// Default scenario run config with the nominal profile attached.
RunConfig nominal_run(GuidanceMode mode);

/// Relative sup-norm distance max|a - b| / max|b|.
double relative_sup(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace entry::test
