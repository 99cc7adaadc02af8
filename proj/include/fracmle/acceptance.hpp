#pragma once

#include <string>
#include <vector>

namespace fracmle::accept {

struct AcResult {
  std::string id;
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

// Full criterion battery AC-1 .. AC-12. quick keeps the algebraic and
// determinism gates at reduced scale and marks the long Monte Carlo sweeps
// skipped. plan_cache overrides the environment cache directory.
std::vector<AcResult> run_acceptance(bool quick, const std::string& plan_cache = "");

// one line per criterion, PASS / FAIL / SKIP
std::string format_results(const std::vector<AcResult>& results);

// true when every non-skipped criterion passed
bool all_passed(const std::vector<AcResult>& results);

}  // namespace fracmle::accept
