#include "v2g/robust_lp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace v2g {

namespace {

std::string idx1(const char* base, int k) { return std::string(base) + "[" + std::to_string(k) + "]"; }
std::string idx2(const char* base, int k, int l) {
  return std::string(base) + "[" + std::to_string(k) + "," + std::to_string(l) + "]";
}

}  // namespace

int window_end_index(int k, int l, int w) {
  if (!(1 <= l && l <= k))
    throw std::invalid_argument("window_end_index: require 1 <= l <= k");
  if (w < 1) throw std::invalid_argument("window_end_index: window length must be positive");
  return std::min(k, l + w - 1);
}

LPModel assemble_lp(const ProblemInstance& inst) {
  inst.validate();
  const int K = inst.horizon.K;
  const double dt = inst.horizon.dt;
  const double eta_p = inst.battery.eta_plus;
  const double eta_m = inst.battery.eta_minus;
  const double de = inst.battery.delta_eta();
  const double gamma = inst.u_hard.b * dt;       // exact integer multiple of dt
  const double gamma_hat = inst.u_soft.b * dt;
  const int w = inst.u_hard.w;
  const int w_hat = inst.u_soft.w;

  LPModel lp;

  // decision variables
  std::vector<int> xb(K), xr(K), m(K);
  for (int k = 1; k <= K; ++k)
    xb[k - 1] = lp.add_variable(idx1("x_b", k), 0.0, kInf, dt * inst.prices.p_b[k - 1]);
  for (int k = 1; k <= K; ++k)
    xr[k - 1] = lp.add_variable(idx1("x_r", k), 0.0, kInf, -dt * inst.prices.p_r[k - 1]);
  for (int k = 1; k <= K; ++k) m[k - 1] = lp.add_variable(idx1("m", k), -kInf, kInf);
  const int z = lp.add_variable("z", -kInf, kInf, inst.target.p_star);

  // dual blocks, lower triangle l <= k
  std::vector<std::vector<int>> Lp(K + 1), Lm(K + 1), Tp(K + 1), Tm(K + 1);
  for (int k = 1; k <= K; ++k) {
    Lp[k].resize(k);
    Lm[k].resize(k);
    Tp[k].resize(k);
    Tm[k].resize(k);
    for (int l = 1; l <= k; ++l) {
      Lp[k][l - 1] = lp.add_variable(idx2("Lam_p", k, l), 0.0, kInf);
      Lm[k][l - 1] = lp.add_variable(idx2("Lam_m", k, l), 0.0, kInf);
      Tp[k][l - 1] = lp.add_variable(idx2("The_p", k, l), 0.0, kInf);
      Tm[k][l - 1] = lp.add_variable(idx2("The_m", k, l), 0.0, kInf);
    }
  }
  std::vector<int> lp_(K), lm_(K), tp_(K), tm_(K);
  for (int k = 1; k <= K; ++k) {
    lp_[k - 1] = lp.add_variable(idx1("lam_p", k), 0.0, kInf);
    lm_[k - 1] = lp.add_variable(idx1("lam_m", k), 0.0, kInf);
    tp_[k - 1] = lp.add_variable(idx1("the_p", k), 0.0, kInf);
    tm_[k - 1] = lp.add_variable(idx1("the_m", k), 0.0, kInf);
  }

  // power bounds
  for (int k = 1; k <= K; ++k) {
    const int r = lp.add_row(idx1("pow_p", k), RowSense::LessEqual, inst.profile.ybar_plus[k - 1]);
    lp.add_coefficient(r, xr[k - 1], 1.0);
    lp.add_coefficient(r, xb[k - 1], 1.0);
  }
  for (int k = 1; k <= K; ++k) {
    const int r = lp.add_row(idx1("pow_m", k), RowSense::LessEqual, inst.profile.ybar_minus[k - 1]);
    lp.add_coefficient(r, xr[k - 1], 1.0);
    lp.add_coefficient(r, xb[k - 1], -1.0);
  }

  // epigraph rows for m
  for (int k = 1; k <= K; ++k) {
    const int r = lp.add_row(idx1("epi_p", k), RowSense::GreaterEqual, 0.0);
    lp.add_coefficient(r, m[k - 1], 1.0);
    lp.add_coefficient(r, xr[k - 1], -eta_p);
  }
  for (int k = 1; k <= K; ++k) {
    const int r = lp.add_row(idx1("epi_d", k), RowSense::GreaterEqual, 0.0);
    lp.add_coefficient(r, m[k - 1], 1.0);
    lp.add_coefficient(r, xr[k - 1], -1.0 / eta_m);
    lp.add_coefficient(r, xb[k - 1], de);
  }

  // cumulative driving energy for the constraint right-hand sides
  Vec drive_cum(K + 1);
  drive_cum[0] = 0.0;
  for (int k = 1; k <= K; ++k) drive_cum[k] = drive_cum[k - 1] + inst.profile.d[k - 1];

  // dualized state-of-charge rows on the hard window, k = 0..K
  for (int k = 0; k <= K; ++k) {
    const double rhs = inst.battery.y_max - inst.y0_hard.hi + dt * drive_cum[k];
    const int r = lp.add_row(idx1("soc_max", k), RowSense::LessEqual, rhs);
    for (int l = 1; l <= k; ++l) {
      lp.add_coefficient(r, xb[l - 1], dt * eta_p);
      lp.add_coefficient(r, Lp[k][l - 1], dt);
      lp.add_coefficient(r, Tp[k][l - 1], gamma);
    }
  }
  for (int k = 0; k <= K; ++k) {
    const double rhs = inst.battery.y_min - inst.y0_hard.lo + dt * drive_cum[k];
    const int r = lp.add_row(idx1("soc_min", k), RowSense::GreaterEqual, rhs);
    for (int l = 1; l <= k; ++l) {
      lp.add_coefficient(r, xb[l - 1], dt * eta_p);
      lp.add_coefficient(r, Lm[k][l - 1], -dt);
      lp.add_coefficient(r, Tm[k][l - 1], -gamma);
    }
  }

  // terminal rows on the soft window
  {
    const int r = lp.add_row("term_max", RowSense::LessEqual,
                             inst.target.y_star - inst.y0_soft.hi + dt * drive_cum[K]);
    for (int k = 1; k <= K; ++k) {
      lp.add_coefficient(r, xb[k - 1], dt * eta_p);
      lp.add_coefficient(r, lp_[k - 1], dt);
      lp.add_coefficient(r, tp_[k - 1], gamma_hat);
    }
    lp.add_coefficient(r, z, -1.0);
  }
  {
    const int r = lp.add_row("term_min", RowSense::GreaterEqual,
                             inst.target.y_star - inst.y0_soft.lo + dt * drive_cum[K]);
    for (int k = 1; k <= K; ++k) {
      lp.add_coefficient(r, xb[k - 1], dt * eta_p);
      lp.add_coefficient(r, lm_[k - 1], -dt);
      lp.add_coefficient(r, tm_[k - 1], -gamma_hat);
    }
    lp.add_coefficient(r, z, 1.0);
  }

  // covering rows of the hard dual blocks
  for (int k = 1; k <= K; ++k) {
    for (int l = 1; l <= k; ++l) {
      const int end = window_end_index(k, l, w);
      int r = lp.add_row(idx2("cov_p", k, l), RowSense::GreaterEqual, 0.0);
      lp.add_coefficient(r, Lp[k][l - 1], 1.0);
      for (int i = l; i <= end; ++i) lp.add_coefficient(r, Tp[k][i - 1], 1.0);
      lp.add_coefficient(r, xr[l - 1], -eta_p);

      r = lp.add_row(idx2("cov_m", k, l), RowSense::GreaterEqual, 0.0);
      lp.add_coefficient(r, Lm[k][l - 1], 1.0);
      for (int i = l; i <= end; ++i) lp.add_coefficient(r, Tm[k][i - 1], 1.0);
      lp.add_coefficient(r, m[l - 1], -1.0);
    }
  }

  // covering rows of the soft terminal blocks
  for (int k = 1; k <= K; ++k) {
    const int end = window_end_index(K, k, w_hat);
    int r = lp.add_row(idx1("cov_t_p", k), RowSense::GreaterEqual, 0.0);
    lp.add_coefficient(r, lp_[k - 1], 1.0);
    for (int i = k; i <= end; ++i) lp.add_coefficient(r, tp_[i - 1], 1.0);
    lp.add_coefficient(r, xr[k - 1], -eta_p);

    r = lp.add_row(idx1("cov_t_m", k), RowSense::GreaterEqual, 0.0);
    lp.add_coefficient(r, lm_[k - 1], 1.0);
    for (int i = k; i <= end; ++i) lp.add_coefficient(r, tm_[i - 1], 1.0);
    lp.add_coefficient(r, m[k - 1], -1.0);
  }

  lp.finalize();
  return lp;
}

LPModel assemble_lp_no_regulation(const ProblemInstance& inst) {
  LPModel lp = assemble_lp(inst);
  for (int k = 1; k <= inst.horizon.K; ++k)
    lp.set_bounds(lp.var(idx1("x_r", k)), 0.0, 0.0);
  return lp;
}

long paper_variable_count(int K) { return 4L * K * K + 7L * K + 1; }
long paper_constraint_count(int K) { return 5L * K * K + 15L * K + 4; }
long dual_block_variable_count(int K) { return 4L * K * K + 4L * K; }
long physical_variable_count(int K) { return 2L * K * K + 9L * K + 1; }
long physical_constraint_count(int K) { return 1L * K * K + 9L * K + 4; }

SolvedDay extract_decision(const LPModel& model, const SolveResult& raw) {
  SolvedDay day;
  day.status = raw.status;
  day.iterations = raw.iterations;
  if (raw.status != SolveStatus::Optimal) return day;

  int K = 0;
  while (model.has_var(idx1("x_b", K + 1))) ++K;

  day.decision.x_b.resize(K);
  day.decision.x_r.resize(K);
  day.m_lp.resize(K);
  for (int k = 1; k <= K; ++k) {
    day.decision.x_b[k - 1] = std::max(0.0, raw.primal[model.var(idx1("x_b", k))]);
    day.decision.x_r[k - 1] = std::max(0.0, raw.primal[model.var(idx1("x_r", k))]);
    day.m_lp[k - 1] = raw.primal[model.var(idx1("m", k))];
  }
  day.z = raw.primal[model.var("z")];
  day.objective = raw.objective;
  day.duals = raw.dual;
  day.primal = raw.primal;
  return day;
}

SolvedDay solve_day(const ProblemInstance& inst, const SolveSettings& settings,
                    bool no_regulation) {
  const LPModel lp = no_regulation ? assemble_lp_no_regulation(inst) : assemble_lp(inst);
  SolvedDay day = extract_decision(lp, solve(lp, settings));
  if (day.status == SolveStatus::Optimal)
    day.m_closed = min_soc_weights(day.decision, inst.battery);
  return day;
}

FeasibilityReport verify_robust_feasibility(const MarketDecision& decision,
                                            const ProblemInstance& inst,
                                            const SolveSettings& settings) {
  const int K = inst.horizon.K;
  if (decision.size() != K)
    throw std::invalid_argument("verify_robust_feasibility: decision length must equal K");
  FeasibilityReport rep;
  for (int k = 0; k < K; ++k) {
    rep.power_violation = std::max(
        rep.power_violation, decision.x_r[k] + decision.x_b[k] - inst.profile.ybar_plus[k]);
    rep.power_violation = std::max(
        rep.power_violation, decision.x_r[k] - decision.x_b[k] - inst.profile.ybar_minus[k]);
  }
  for (int k = 0; k <= K; ++k) {
    const double hi = worst_case_max_soc(decision, inst.y0_hard.hi, inst, inst.u_hard, k, settings);
    const double lo = worst_case_min_soc(decision, inst.y0_hard.lo, inst, inst.u_hard, k, settings);
    rep.soc_upper_violation = std::max(rep.soc_upper_violation, hi - inst.battery.y_max);
    rep.soc_lower_violation = std::max(rep.soc_lower_violation, inst.battery.y_min - lo);
  }
  rep.max_violation =
      std::max({rep.power_violation, rep.soc_upper_violation, rep.soc_lower_violation, 0.0});
  return rep;
}

double dual_block_value(const LPModel& model, const Vec& primal, int k, int side, int K,
                        double dt, double gamma) {
  if (k < 0 || k > K) throw std::invalid_argument("dual_block_value: k out of range");
  const char* lam = side > 0 ? "Lam_p" : "Lam_m";
  const char* the = side > 0 ? "The_p" : "The_m";
  double v = 0.0;
  for (int l = 1; l <= k; ++l) {
    v += dt * primal[model.var(idx2(lam, k, l))];
    v += gamma * primal[model.var(idx2(the, k, l))];
  }
  return v;
}

double min_dual_block(const UncertaintyWindowSpec& spec, const Vec& weights, int k,
                      const SolveSettings& settings) {
  if (k < 0 || k > spec.K) throw std::invalid_argument("min_dual_block: k out of range");
  if (k == 0) return 0.0;
  const double gamma = spec.b * spec.dt;
  LPModel lp;
  std::vector<int> lam(k), the(k);
  for (int l = 1; l <= k; ++l) lam[l - 1] = lp.add_variable(idx1("lam", l), 0.0, kInf, spec.dt);
  for (int i = 1; i <= k; ++i) the[i - 1] = lp.add_variable(idx1("the", i), 0.0, kInf, gamma);
  for (int l = 1; l <= k; ++l) {
    const int r = lp.add_row(idx1("cov", l), RowSense::GreaterEqual, weights[l - 1]);
    lp.add_coefficient(r, lam[l - 1], 1.0);
    for (int i = l; i <= window_end_index(k, l, spec.w); ++i)
      lp.add_coefficient(r, the[i - 1], 1.0);
  }
  lp.finalize();
  const SolveResult res = solve(lp, settings);
  if (res.status != SolveStatus::Optimal)
    throw std::runtime_error("min_dual_block: dual LP did not solve");
  return res.objective;
}

}  // namespace v2g
