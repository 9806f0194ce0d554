#pragma once

// The twelve acceptance criteria, each judged on its metric and its runtime
// budget.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace fracwave {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool metric_pass = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::string detail;

  bool pass() const { return metric_pass && seconds <= limit_seconds; }
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240607;
  int threads = 1;
  std::vector<int> only;  // empty runs all criteria
};

int acceptance_count();

// Runs the selected criteria in order; when `live` is set each result line is
// written as soon as the criterion finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream* live);

// "PASS [ 1] name: detail (0.12 s, limit 5 s)".
std::string format_result(const CriterionResult& r);

}  // namespace fracwave
