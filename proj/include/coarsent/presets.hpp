#pragma once

#include <string>
#include <vector>

#include "coarsent/config.hpp"
#include "coarsent/runner.hpp"

namespace coarsent {

const std::vector<std::string>& preset_ids();
bool is_preset(const std::string& id);

/// One-line description of what the preset demonstrates.
std::string preset_description(const std::string& id);
/// Expected outcome, appended to the run summary.
std::string preset_expectation(const std::string& id);

/// Complete experiment document; parse_config accepts it unchanged.
Json preset_config(const std::string& id);

struct PresetVerdict {
  bool passed = true;
  std::vector<std::string> checks;  ///< "PASS ..." / "FAIL ..." lines
};

PresetVerdict check_preset(const std::string& id, const RunResult& result);

}  // namespace coarsent
