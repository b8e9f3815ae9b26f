#include "v2g/uncertainty.hpp"

#include <cmath>
#include <stdexcept>

#include "v2g/instance.hpp"
#include "v2g/lp_model.hpp"

namespace v2g {

namespace {

int integral_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const int n = static_cast<int>(std::llround(r));
  if (n < 1 || std::abs(r - n) > 1e-9 * std::max(1.0, std::abs(r)))
    throw std::invalid_argument(std::string("UncertaintyWindowSpec: ") + what +
                                " must be a positive multiple of dt");
  return n;
}

constexpr double kMembershipTol = 1e-9;

}  // namespace

UncertaintyWindowSpec::UncertaintyWindowSpec(double gamma_h, double Gamma_h, double dt_h,
                                             int intervals)
    : gamma(gamma_h), Gamma(Gamma_h), dt(dt_h), K(intervals) {
  if (K < 1) throw std::invalid_argument("UncertaintyWindowSpec: K must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("UncertaintyWindowSpec: dt must be positive");
  if (!(gamma > 0.0 && gamma <= Gamma))
    throw std::invalid_argument("UncertaintyWindowSpec: require 0 < gamma <= Gamma");
  b = integral_ratio(gamma, dt, "gamma");
  w = std::min(integral_ratio(Gamma, dt, "Gamma"), K);
  if (b > w) b = w;  // budget beyond the window length never binds
}

bool contains(const UncertaintyWindowSpec& spec, const Vec& delta) {
  if (delta.size() != spec.K)
    throw std::invalid_argument("contains: scenario length must equal K");
  double window = 0.0;
  for (int k = 0; k < spec.K; ++k) {
    const double a = std::abs(delta[k]);
    if (a > 1.0 + kMembershipTol) return false;
    window += a;
    if (k >= spec.w) window -= std::abs(delta[k - spec.w]);
    if (window > spec.b + kMembershipTol) return false;
  }
  return true;
}

namespace {

void enumerate_rec(const UncertaintyWindowSpec& spec, Vec& delta, std::vector<int>& prefix_ones,
                   int depth, std::vector<Vec>& out) {
  if (depth == spec.K) {
    out.push_back(delta);
    return;
  }
  const int start = std::max(0, depth - spec.w + 1);
  for (int bit = 0; bit <= 1; ++bit) {
    const int window_ones = prefix_ones[depth] - prefix_ones[start] + bit;
    if (window_ones > spec.b) continue;
    delta[depth] = bit;
    prefix_ones[depth + 1] = prefix_ones[depth] + bit;
    enumerate_rec(spec, delta, prefix_ones, depth + 1, out);
  }
  delta[depth] = 0.0;
}

}  // namespace

std::vector<Vec> enumerate_binary_scenarios(const UncertaintyWindowSpec& spec, int cap) {
  if (spec.K > cap)
    throw std::invalid_argument("enumerate_binary_scenarios: K exceeds the enumeration cap");
  std::vector<Vec> out;
  Vec delta = Vec::Zero(spec.K);
  std::vector<int> prefix_ones(spec.K + 1, 0);
  enumerate_rec(spec, delta, prefix_ones, 0, out);
  return out;
}

namespace {

void check_weights(const UncertaintyWindowSpec& spec, const Vec& weights, int k) {
  if (k < 0 || k > spec.K)
    throw std::invalid_argument("worst_case_weighted_sum: prefix length out of range");
  if (weights.size() < k)
    throw std::invalid_argument("worst_case_weighted_sum: weights shorter than prefix");
  if ((weights.head(k).array() < -1e-12).any())
    throw std::invalid_argument(
        "worst_case_weighted_sum: negative weight; apply the sign symmetry first");
}

}  // namespace

WorstCase worst_case_weighted_sum(const UncertaintyWindowSpec& spec, const Vec& weights, int k,
                                  const SolveSettings& settings) {
  check_weights(spec, weights, k);
  WorstCase wc;
  wc.argmax = Vec::Zero(spec.K);
  if (k == 0 || weights.head(k).maxCoeff() <= 0.0) return wc;

  LPModel lp;
  for (int l = 0; l < spec.K; ++l)
    lp.add_variable("d[" + std::to_string(l + 1) + "]", 0.0, 1.0,
                    l < k ? -weights[l] : 0.0);
  for (int j = 0; j < spec.K; ++j) {
    const int r = lp.add_row("win[" + std::to_string(j + 1) + "]", RowSense::LessEqual,
                             static_cast<double>(spec.b));
    for (int l = std::max(0, j - spec.w + 1); l <= j; ++l) lp.add_coefficient(r, l, 1.0);
  }
  lp.finalize();

  const SolveResult res = solve(lp, settings);
  if (res.status != SolveStatus::Optimal)
    throw std::runtime_error("worst_case_weighted_sum: oracle LP did not solve to optimality");

  // TU structure makes the vertex binary; snap and recompute the value exactly
  wc.argmax = res.primal;
  bool binary = true;
  for (int l = 0; l < spec.K; ++l) {
    const double r = std::round(wc.argmax[l]);
    if (std::abs(wc.argmax[l] - r) <= 1e-7)
      wc.argmax[l] = r;
    else
      binary = false;
  }
  if (binary) {
    double v = 0.0;
    for (int l = 0; l < k; ++l) v += weights[l] * wc.argmax[l];
    wc.value = v;
  } else {
    wc.value = -res.objective;
  }
  return wc;
}

WorstCase brute_force_weighted_sum(const UncertaintyWindowSpec& spec, const Vec& weights, int k,
                                   int cap) {
  check_weights(spec, weights, k);
  WorstCase best;
  best.argmax = Vec::Zero(spec.K);
  for (const Vec& s : enumerate_binary_scenarios(spec, cap)) {
    double v = 0.0;
    for (int l = 0; l < k; ++l) v += weights[l] * s[l];
    if (v > best.value) {
      best.value = v;
      best.argmax = s;
    }
  }
  return best;
}

Vec min_soc_weights(const MarketDecision& x, const BatteryParams& battery) {
  const double de = battery.delta_eta();
  Vec m(x.x_r.size());
  for (Eigen::Index l = 0; l < m.size(); ++l)
    m[l] = std::max(battery.eta_plus * x.x_r[l], x.x_r[l] / battery.eta_minus - de * x.x_b[l]);
  return m;
}

namespace {

double deterministic_prefix(const MarketDecision& x, const ProblemInstance& inst, int k) {
  double s = 0.0;
  for (int l = 0; l < k; ++l) s += inst.battery.eta_plus * x.x_b[l] - inst.profile.d[l];
  return s;
}

}  // namespace

double worst_case_max_soc(const MarketDecision& x, double y0_hi, const ProblemInstance& inst,
                          const UncertaintyWindowSpec& spec, int k,
                          const SolveSettings& settings) {
  if ((x.x_b.array() < -1e-12).any() || (x.x_r.array() < -1e-12).any())
    throw std::invalid_argument("worst_case_max_soc: decisions must be nonnegative");
  const Vec weights = inst.battery.eta_plus * x.x_r;
  const WorstCase wc = worst_case_weighted_sum(spec, weights, k, settings);
  return y0_hi + inst.horizon.dt * (deterministic_prefix(x, inst, k) + wc.value);
}

double worst_case_min_soc(const MarketDecision& x, double y0_lo, const ProblemInstance& inst,
                          const UncertaintyWindowSpec& spec, int k,
                          const SolveSettings& settings) {
  if ((x.x_b.array() < -1e-12).any() || (x.x_r.array() < -1e-12).any())
    throw std::invalid_argument("worst_case_min_soc: decisions must be nonnegative");
  const Vec weights = min_soc_weights(x, inst.battery);
  const WorstCase wc = worst_case_weighted_sum(spec, weights, k, settings);
  return y0_lo + inst.horizon.dt * (deterministic_prefix(x, inst, k) - wc.value);
}

UncertaintyWindowSpec refine_subgrid(const UncertaintyWindowSpec& spec, SubgridSpec sub) {
  if (sub.N < 1) throw std::invalid_argument("refine_subgrid: N must be >= 1");
  return UncertaintyWindowSpec(spec.gamma, spec.Gamma, spec.dt / sub.N, spec.K * sub.N);
}

VarianceReport check_variance_bound(const UncertaintyWindowSpec& spec,
                                    const std::vector<Vec>& scenarios, int cap) {
  VarianceReport rep;
  const int cycles = (spec.K + spec.w - 1) / spec.w;  // ceil(T/Gamma)
  rep.bound = static_cast<double>(cycles) * spec.b / spec.K;

  const std::vector<Vec> tested =
      scenarios.empty() ? enumerate_binary_scenarios(spec, cap) : scenarios;
  for (const Vec& s : tested)
    rep.max_variance = std::max(rep.max_variance, s.squaredNorm() / spec.K);
  rep.within_bound = rep.max_variance <= rep.bound + 1e-12;

  // relaxed budget set: a single budget over the whole horizon
  const int b_rel = std::min(cycles * spec.b, spec.K);
  rep.relaxed_budget = b_rel * spec.dt;
  const UncertaintyWindowSpec relaxed(b_rel * spec.dt, spec.K * spec.dt, spec.dt, spec.K);
  if (spec.K <= cap) {
    for (const Vec& s : enumerate_binary_scenarios(relaxed, cap))
      rep.relaxed_max = std::max(rep.relaxed_max, s.squaredNorm() / spec.K);
    rep.relaxed_attained = std::abs(rep.relaxed_max - static_cast<double>(b_rel) / spec.K) <= 1e-12;
  }
  return rep;
}

}  // namespace v2g
