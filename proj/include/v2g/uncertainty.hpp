#pragma once

#include <vector>

#include "v2g/model.hpp"
#include "v2g/simplex.hpp"

namespace v2g {

struct ProblemInstance;

// Rolling-window budget uncertainty set on K trading intervals:
//   { delta in [-1,1]^K :  sum_{l=1+[k-w]+}^{k} |delta_l| <= b   for all k },
// with window length w = Gamma/dt and budget b = gamma/dt. Both ratios must
// be integral; fractional values are a construction-time error. Windows
// longer than the horizon are capped at K, which leaves the set unchanged.
struct UncertaintyWindowSpec {
  double gamma = 0.5;  // activation period (h)
  double Gamma = 2.5;  // regulation cycle (h)
  double dt = 0.5;     // trading interval (h)
  int K = 48;
  int w = 5;           // Gamma/dt, capped at K
  int b = 1;           // gamma/dt

  UncertaintyWindowSpec() = default;
  UncertaintyWindowSpec(double gamma_h, double Gamma_h, double dt_h, int intervals);

  double horizon() const { return K * dt; }
};

/// One frequency-deviation scenario on the trading grid.
struct Scenario {
  Vec delta;
};

/// Number of subdivisions per trading interval for the refined grid.
struct SubgridSpec {
  int N = 1;
};

/// Exact membership test for the rolling-window budget set.
bool contains(const UncertaintyWindowSpec& spec, const Vec& delta);

// All binary vectors of the nonnegative set D+_K, in lexicographic order.
// These include every vertex of the polytope. Refuses K beyond the cap.
std::vector<Vec> enumerate_binary_scenarios(const UncertaintyWindowSpec& spec, int cap = 20);

struct WorstCase {
  double value = 0.0;
  Vec argmax;  // a binary vertex of D+_K
};

// max sum_{l<k} weights_l * delta_l over D+_K, solved as an LP over the
// totally unimodular polytope. Weights must be nonnegative; callers apply
// the sign symmetry delta <-> |delta| beforehand. Weights beyond the prefix
// length k are zeroed.
WorstCase worst_case_weighted_sum(const UncertaintyWindowSpec& spec, const Vec& weights, int k,
                                  const SolveSettings& settings = {});

/// Enumeration-based independent oracle for the same maximum.
WorstCase brute_force_weighted_sum(const UncertaintyWindowSpec& spec, const Vec& weights, int k,
                                   int cap = 20);

// Linear-decision-rule slopes m_l = max{eta+ x_r_l, x_r_l/eta- - delta_eta x_b_l}
// driving the worst-case minimum state-of-charge.
Vec min_soc_weights(const MarketDecision& x, const BatteryParams& battery);

/// Worst-case state-of-charge after the first k intervals, from above.
double worst_case_max_soc(const MarketDecision& x, double y0_hi, const ProblemInstance& inst,
                          const UncertaintyWindowSpec& spec, int k,
                          const SolveSettings& settings = {});

/// Worst-case state-of-charge after the first k intervals, from below.
double worst_case_min_soc(const MarketDecision& x, double y0_lo, const ProblemInstance& inst,
                          const UncertaintyWindowSpec& spec, int k,
                          const SolveSettings& settings = {});

/// Subdivide every trading interval into N pieces (exact set refinement).
UncertaintyWindowSpec refine_subgrid(const UncertaintyWindowSpec& spec, SubgridSpec N);

struct VarianceReport {
  double max_variance = 0.0;    // max (1/K) sum delta_k^2 over tested scenarios
  double bound = 0.0;           // ceil(T/Gamma) * gamma / T
  bool within_bound = false;
  double relaxed_budget = 0.0;  // beta = ceil(T/Gamma) * gamma, capped at T
  double relaxed_max = 0.0;     // max variance over the relaxed budget set
  bool relaxed_attained = false;  // relaxed_max equals beta/T at a binary point
};

// Checks the variance bound on enumerated binary scenarios (which attain the
// true maximum) or on caller-provided scenarios when given.
VarianceReport check_variance_bound(const UncertaintyWindowSpec& spec,
                                    const std::vector<Vec>& scenarios = {}, int cap = 20);

}  // namespace v2g
