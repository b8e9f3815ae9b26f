#pragma once

#include "v2g/instance.hpp"
#include "v2g/lp_model.hpp"
#include "v2g/simplex.hpp"
#include "v2g/uncertainty.hpp"

namespace v2g {

// Last window index covering interval l that is still relevant for the
// prefix ending at k: min{k, l + w - 1}. Indices are 1-based.
int window_end_index(int k, int l, int w);

// Builds the dualized robust LP for one planning day. Dual blocks are
// materialized only for l <= k (lower triangle); the dropped upper-triangle
// entries are fixed at zero in the source formulation, so the analytic count
// helpers below reconcile the physical model with the full-size formulas.
LPModel assemble_lp(const ProblemInstance& inst);

/// Same model with the reserve variables fixed to zero.
LPModel assemble_lp_no_regulation(const ProblemInstance& inst);

// Size of the full formulation, counting the fixed-at-zero upper-triangle
// dual entries and all variable nonnegativity conditions as constraints.
long paper_variable_count(int K);      // 4K^2 + 7K + 1
long paper_constraint_count(int K);    // 5K^2 + 15K + 4
long dual_block_variable_count(int K); // 4K^2 + 4K
long physical_variable_count(int K);   // 2K^2 + 9K + 1
long physical_constraint_count(int K); // K^2 + 9K + 4

struct SolvedDay {
  SolveStatus status = SolveStatus::Infeasible;
  MarketDecision decision;
  Vec m_lp;      // epigraph values reported by the solver
  Vec m_closed;  // recomputed max{eta+ x_r, x_r/eta- - delta_eta x_b}
  double z = 0.0;
  double objective = 0.0;  // expected cost + p* z
  Vec duals;               // row multipliers of the assembled LP
  Vec primal;              // full primal vector, for dual-block inspection
  int iterations = 0;
};

/// Named unpacking of a raw LP solution into market decisions.
SolvedDay extract_decision(const LPModel& model, const SolveResult& raw);

/// assemble + solve + extract in one call.
SolvedDay solve_day(const ProblemInstance& inst, const SolveSettings& settings = {},
                    bool no_regulation = false);


struct FeasibilityReport {
  double power_violation = 0.0;      // kW
  double soc_upper_violation = 0.0;  // kWh
  double soc_lower_violation = 0.0;  // kWh
  double max_violation = 0.0;
};

// Re-checks a decision against the power bounds and the worst-case
// state-of-charge envelope on the hard uncertainty set, via the oracles.
FeasibilityReport verify_robust_feasibility(const MarketDecision& decision,
                                            const ProblemInstance& inst,
                                            const SolveSettings& settings = {});

// Value of the dual block sum_l (dt Lam[k,l] + gamma The[k,l]) at a solution
// of the assembled LP. side: +1 for the max-SoC block, -1 for the min block.
double dual_block_value(const LPModel& model, const Vec& primal, int k, int side, int K,
                        double dt, double gamma);

// Minimal dual-block value for given covering weights: the LP dual of
// worst_case_weighted_sum, solved directly. Strong duality makes this equal
// to the oracle maximum.
double min_dual_block(const UncertaintyWindowSpec& spec, const Vec& weights, int k,
                      const SolveSettings& settings = {});

}  // namespace v2g
