#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vecsim {

// Outcome of one oracle suite. `detail` holds a summary on success and the
// first counterexample on failure.
struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Hungarian weight against the maximum over all n! permutations.
SuiteResult suite_hungarian(int matrices = 1000, int n = 6, std::uint64_t seed = 1);

// Ordered partition counts against brute-force surjection counts, plus the
// structural checks on every configuration.
SuiteResult suite_partitions(int max_aps = 8, int max_blocks = 5);

// Configuration search against exhaustive search over configurations and
// pRB assignments; the OpenMP and serial searches must also agree.
SuiteResult suite_vc_search(int trials_per_shape = 20, int max_aps = 4, int max_prbs = 4,
                            std::uint64_t seed = 7);

// Empirical request-count tails against the closed-form bound, plus the exact
// binomial reference case.
SuiteResult suite_chernoff(long slots = 100000, std::uint64_t seed = 11);

// Analytic Q-network gradients against central differences.
SuiteResult suite_gradient(std::uint64_t seed = 13, double step = 1e-5, double tolerance = 1e-4);

// Action index <-> placement round trips for every feasible cache size.
SuiteResult suite_codec();

// Hand traces of the eligibility rules.
SuiteResult suite_eligibility();

std::vector<SuiteResult> run_all_suites();

// One line per suite: "PASS|FAIL name (seconds s): detail".
std::string format_suite(const SuiteResult& r);

} // namespace vecsim
