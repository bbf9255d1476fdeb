#pragma once

// Invariant suite run by `rotnum validate`: exact identities of Phi, lift
// properties, translation-value relations and Sturm counts against a dense
// eigensolver.

#include <cstdint>
#include <string>
#include <vector>

namespace rotnum::tools {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest observed error
  double tolerance = 0.0;
  std::int64_t cases = 0;
  std::string detail;
};

struct SuiteOptions {
  std::int64_t cases = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

CheckResult check_phi_additivity(const SuiteOptions& opt);
CheckResult check_phi_unit_period(const SuiteOptions& opt);
CheckResult check_phi_shift(const SuiteOptions& opt);
CheckResult check_coupling_identity(const SuiteOptions& opt);
CheckResult check_lift_degree_one(const SuiteOptions& opt);
CheckResult check_lift_monotone(const SuiteOptions& opt);
CheckResult check_lift_independence(const SuiteOptions& opt);
CheckResult check_rigid_rotation(const SuiteOptions& opt);
/// 100 potentials x L in {8,16,32,64} x 10 energies when cases >= 1000.
CheckResult check_sturm_dense(const SuiteOptions& opt);
CheckResult check_translation_linearity(const SuiteOptions& opt);
CheckResult check_cocycle_relation(const SuiteOptions& opt);
CheckResult check_walk_exact(const SuiteOptions& opt);

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& opt);

/// "PASS name (worst 1.2e-16 <= 1e-12, 1000 cases)"
std::string format_check(const CheckResult& r);

}  // namespace rotnum::tools
