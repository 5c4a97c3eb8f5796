#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbst/calibrate.hpp"
#include "fbst/montecarlo.hpp"

namespace fbst::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNumerical = 3,
  kIo = 4,
};

/// Runs the tool on `args` (without the program name). Results go to `out`
/// unless --output redirects them; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// Default --n-list: 10, 50, 100 ... 500, 1000, 1500, 2000.
const std::vector<std::int64_t>& default_n_list();

nlohmann::ordered_json to_json(const CalibrationResult& r);
CalibrationResult calibration_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const McEstimate& e);
McEstimate mc_estimate_from_json(const nlohmann::json& j);

}  // namespace fbst::cli
