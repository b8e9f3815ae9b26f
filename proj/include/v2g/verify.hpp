#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "v2g/robust_lp.hpp"
#include "v2g/sim.hpp"

namespace v2g {

struct CheckResult {
  std::string id;
  bool pass = false;
  double observed = 0.0;  // worst metric seen
  double bound = 0.0;     // tolerance it is held against
  std::string detail;
};

struct VerifyOptions {
  uint64_t seed = 1;
  int enumeration_cap = 20;
  int max_k = 20;  // refuse enumeration-backed checks beyond this
  SolveSettings solve;
};

// Strong duality between the dual-block minimization and the worst-case
// oracle: min over the block of sum(dt*Lam + gamma*The) subject to the
// covering rows with `block_weights` must equal dt times the oracle maximum
// for `oracle_weights`. Both weight vectors are the same in production;
// separating them lets tests inject a corrupted epigraph vector.
CheckResult check_dual_tightness(const UncertaintyWindowSpec& spec, const Vec& block_weights,
                                 const Vec& oracle_weights, int k,
                                 const SolveSettings& settings = {});

/// Runs the full desk-scale property suite; every entry must pass.
std::vector<CheckResult> run_verification(const VerifyOptions& options = {});

void write_check_csv(const std::vector<CheckResult>& checks, std::ostream& os,
                     const std::string& header_comment = {});

}  // namespace v2g
