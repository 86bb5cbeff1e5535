#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "covspec/config.hpp"
#include "covspec/harness.hpp"

namespace covspec {

/// CSV header. With `flags`, six component switch columns follow the metrics.
std::string csv_header(bool flags = false);
std::string csv_row(const RunReport& report, const ExperimentConfig& cfg, bool flags = false);

/// Full per-round detail as JSON text.
std::string report_json(const RunReport& report, const ExperimentConfig& cfg);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace covspec
