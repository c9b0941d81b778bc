#pragma once

// JSON and flat-CSV serialization of test reports and simulation summaries.
// JSON numbers use the shortest representation that parses back to the
// identical double.

#include <string>
#include <vector>

#include "json.hpp"
#include "rao/sim_harness.hpp"

namespace rao::io {

inline constexpr const char* kReportSchema = "rao-beta-score/1";
inline constexpr const char* kSummarySchema = "rao-beta-sim/1";

// A (test, beta) cell of the test subcommand: a report or an error.
struct TestOutcome {
  TestKind kind = TestKind::Independence;
  double beta = 0.0;
  std::optional<TestReport> report;
  std::string error_class;  // e.g. "convergence", "degeneracy"
  std::string error;
};

nlohmann::json to_json(const TestReport& r);
TestReport report_from_json(const nlohmann::json& j);

std::string reports_to_json(const std::vector<TestOutcome>& outcomes);
std::vector<TestReport> reports_from_json(const std::string& text);
std::string reports_to_csv(const std::vector<TestOutcome>& outcomes);

std::string summary_to_json(const MonteCarloSummary& s);
std::string summary_to_csv(const MonteCarloSummary& s);

// Short machine-readable class name of a library error.
std::string error_class(const std::exception& e);

}  // namespace rao::io
