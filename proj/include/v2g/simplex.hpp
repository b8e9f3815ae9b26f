#pragma once

#include <string>
#include <utility>
#include <vector>

#include "v2g/lp_model.hpp"

namespace v2g {

enum class PivotRule { SteepestRatio, Bland };

struct SolveSettings {
  double feas_tol = 1e-9;    // absolute primal feasibility tolerance
  double opt_tol = 1e-9;     // relative reduced-cost tolerance
  int max_iters = 200000;
  PivotRule pivot_rule = PivotRule::SteepestRatio;  // Bland kicks in on stall
  int refactor_interval = 96;
  int stall_pivots = 2000;   // consecutive non-improving pivots before Bland fallback
  bool record_pivots = false;

  void validate() const {
    if (!(feas_tol > 0.0) || !(opt_tol > 0.0))
      throw std::invalid_argument("SolveSettings: tolerances must be positive");
  }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  Vec primal;         // length num_vars
  Vec dual;           // row multipliers in the original row orientation
  Vec reduced_costs;  // length num_vars
  double objective = 0.0;
  int iterations = 0;
  int phase1_iterations = 0;
  double max_refactor_residual = 0.0;  // max ||B x_B - b~||_inf observed
  std::vector<std::pair<int, int>> pivot_log;  // (entering, leaving) when recorded
};

// Bounded-variable two-phase revised simplex on sparse column storage.
// >= rows are normalized to <= internally; reported duals are flipped back
// to the original orientation. Deterministic: identical inputs and settings
// reproduce the pivot sequence exactly.
SolveResult solve(const LPModel& model, const SolveSettings& settings = {});

struct CertificateReport {
  bool ok = false;
  double max_primal_residual = 0.0;  // row violation
  double max_bound_violation = 0.0;
  double max_dual_violation = 0.0;   // sign conditions on duals / reduced costs
  double relative_gap = 0.0;         // |c'x - dual objective| / (1 + |c'x|)
  std::vector<std::string> failures;
};

// Independently recomputes feasibility residuals, dual sign conditions and
// the duality gap from the model and the reported solution. Refuses to
// certify non-optimal results.
CertificateReport certify(const LPModel& model, const SolveResult& result,
                          const SolveSettings& settings = {});

// Backend contract behind which an external LP solver can be substituted
// (reached through the MPS interchange file). The bundled implementation
// forwards to solve().
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual SolveResult solve_model(const LPModel& model, const SolveSettings& settings) = 0;
};

class BundledSolver final : public SolverBackend {
 public:
  SolveResult solve_model(const LPModel& model, const SolveSettings& settings) override {
    return solve(model, settings);
  }
};

}  // namespace v2g
