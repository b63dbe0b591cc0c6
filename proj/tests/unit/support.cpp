#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entry::test {

const ScenarioConfig& scenario() {
  static const ScenarioConfig s = default_scenario();
  return s;
}

const RefgenResult& nominal_reference() {
  static const RefgenResult r =
      generate_reference(scenario().run_config(GuidanceMode::open_loop), scenario().refgen);
  return r;
}

std::shared_ptr<const ReferenceProfile> nominal_profile() {
  static const auto p = std::make_shared<const ReferenceProfile>(nominal_reference().profile);
  return p;
}

RunConfig nominal_run(GuidanceMode mode) { return scenario().run_config(mode, nominal_profile()); }

double relative_sup(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("relative_sup: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace entry::test
