#pragma once

// Randomized property checks over the whole stack, run by the `selftest`
// subcommand and by the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace jcanyon {

struct PropertyResult {
  std::string name;
  int cases = 0;
  double worst = 0.0;      // largest observed violation
  double threshold = 0.0;  // pass when worst < threshold (or == 0 for exact checks)
  bool exact = false;
  bool passed = false;
  std::string detail;

  nlohmann::json to_json() const;
};

struct SelftestOptions {
  std::uint64_t seed = 20240601;
  int cases = 40;  // random cases per property
  int jobs = 0;
};

PropertyResult check_unitarity(const SelftestOptions& o);
PropertyResult check_ladder_adjoint(const SelftestOptions& o);
PropertyResult check_su2_commutators(const SelftestOptions& o);
PropertyResult check_number_conservation(const SelftestOptions& o);
PropertyResult check_partial_trace(const SelftestOptions& o);
PropertyResult check_dressed_eigenvectors(const SelftestOptions& o);
PropertyResult check_gauge_invariance(const SelftestOptions& o);
PropertyResult check_branch_equality(const SelftestOptions& o);
PropertyResult check_norm_conservation(const SelftestOptions& o);
PropertyResult check_coupling_series(const SelftestOptions& o);

std::vector<PropertyResult> run_selftest(const SelftestOptions& o = {});

}  // namespace jcanyon
