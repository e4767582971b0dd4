#pragma once

#include <string>
#include <vector>

namespace crowdsim {

struct SuiteResult {
  std::string name;
  bool passed = false;
  int checks = 0;
  int failures = 0;
  std::string detail;
};

// Self-contained property suites with fixed internal seeds:
//   mi_vs_brute_force            lattice MI == pattern-enumeration MI (1e-10)
//   error_vs_brute_force         lattice error == pattern MAP error (1e-12)
//   error_posterior_identity     posterior-enumeration route == exact error
//   chernoff_domination          corrected bound >= exact error; also reports
//                                the as-printed variant's violation rate
//   mi_monotonicity              unit increments never lower MI
//   mi_submodularity             diminishing returns on nested vectors (1e-9)
//   class_symmetry_inertness     class permutation invariance; pi = 1/2
//                                classes change nothing
//   matroid_family               downward closure + exchange + equal maximal
//                                size on tiny exhaustive instances
//   greedy_half_guarantee        greedy P3 >= 1/2 * exhaustive optimum
//   power_iteration_vs_jacobi    singular vector matches a dense Jacobi
//                                eigensolver (angle <= 1e-8)
std::vector<SuiteResult> run_verification_suites();

SuiteResult run_verification_suite(const std::string& name);
std::vector<std::string> verification_suite_names();

}  // namespace crowdsim
