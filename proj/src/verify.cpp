#include "v2g/verify.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace v2g {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// small feasible planning instances for the property suite; the initial
// interval sits well inside the battery range so x = 0 is always feasible
ProblemInstance verify_instance(std::mt19937_64& rng, int K, double dt = 0.5) {
  ProblemInstance inst;
  const double eta = 0.8 + 0.2 * uniform01(rng);
  inst.battery = {10.0, 40.0, eta, eta};
  inst.horizon = HorizonSpec::from_intervals(K, dt);
  Vec d = Vec::Zero(K), yp = Vec::Constant(K, 7.0), ym = Vec::Constant(K, 7.0);
  if (K > 2 && uniform01(rng) < 0.5) d[static_cast<int>(rng() % K)] = 2.0 + 2.0 * uniform01(rng);
  inst.profile = PeriodProfile(d, yp, ym);
  inst.prices.p_b = Vec::NullaryExpr(K, [&](Eigen::Index) { return 0.10 + 0.10 * uniform01(rng); });
  inst.prices.p_a = Vec::NullaryExpr(K, [&](Eigen::Index) { return 0.005 + 0.02 * uniform01(rng); });
  inst.prices.p_r = inst.prices.p_a;
  inst.target = {20.0 + 10.0 * uniform01(rng), 0.05 + 0.2 * uniform01(rng)};
  const double c = 20.0 + 8.0 * uniform01(rng), h = 2.0 * uniform01(rng);
  inst.y0_hard = {c - h, c + h};
  inst.y0_soft = {c - 0.5 * h, c + 0.5 * h};
  const int w = 2 + static_cast<int>(rng() % 3);
  inst.u_hard = UncertaintyWindowSpec(dt, std::min(w, K) * dt, dt, K);
  inst.u_soft = UncertaintyWindowSpec(dt, std::min(2 * w, K) * dt, dt, K);
  inst.validate();
  return inst;
}

CheckResult worst_of(std::string id, double observed, double bound, std::string detail = {}) {
  CheckResult r;
  r.id = std::move(id);
  r.observed = observed;
  r.bound = bound;
  r.pass = observed <= bound;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

CheckResult check_dual_tightness(const UncertaintyWindowSpec& spec, const Vec& block_weights,
                                 const Vec& oracle_weights, int k, const SolveSettings& settings) {
  const double block = min_dual_block(spec, block_weights, k, settings);
  const double oracle = spec.dt * worst_case_weighted_sum(spec, oracle_weights, k, settings).value;
  const double gap = std::abs(block - oracle);
  CheckResult r = worst_of("dual_tightness", gap, 1e-8 * (1.0 + std::abs(oracle)));
  std::ostringstream os;
  os << "k=" << k << " block=" << block << " oracle=" << oracle;
  r.detail = os.str();
  return r;
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(options.seed);

  // binary vertices and oracle agreement on the small parameter grid
  {
    double worst_frac = 0.0, worst_gap = 0.0;
    for (int K : {4, 6, 8}) {
      if (K > options.max_k) continue;
      for (int w : {2, 3, 4}) {
        for (int b : {1, 2}) {
          if (b > w) continue;
          const UncertaintyWindowSpec spec(b * 1.0, w * 1.0, 1.0, K);
          for (int trial = 0; trial < 10; ++trial) {
            const Vec weights =
                Vec::NullaryExpr(K, [&](Eigen::Index) { return uniform01(rng) + 1e-6; });
            const int k = 1 + static_cast<int>(rng() % K);
            const WorstCase lp = worst_case_weighted_sum(spec, weights, k, options.solve);
            for (int i = 0; i < K; ++i)
              worst_frac = std::max(worst_frac, std::abs(lp.argmax[i] - std::round(lp.argmax[i])));
            const WorstCase bf = brute_force_weighted_sum(spec, weights, k, options.enumeration_cap);
            worst_gap = std::max(worst_gap, std::abs(lp.value - bf.value));
          }
        }
      }
    }
    out.push_back(worst_of("binary_vertices", worst_frac, 1e-9));
    out.push_back(worst_of("oracle_brute_force", worst_gap, 1e-10));
  }

  // lossless refinement of the prefix worst cases
  {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const int K = 3 + static_cast<int>(rng() % 4);
      const ProblemInstance inst = verify_instance(rng, K);
      const MarketDecision x{
          Vec::NullaryExpr(K, [&](Eigen::Index) { return 2.0 * uniform01(rng); }),
          Vec::NullaryExpr(K, [&](Eigen::Index) { return 2.0 * uniform01(rng); })};
      const int k = 1 + static_cast<int>(rng() % K);
      const double up = worst_case_max_soc(x, 25.0, inst, inst.u_hard, k, options.solve);
      const double dn = worst_case_min_soc(x, 25.0, inst, inst.u_hard, k, options.solve);
      for (int N : {2, 4, 8}) {
        ProblemInstance fine = inst;
        fine.horizon = HorizonSpec::from_intervals(K * N, inst.horizon.dt / N);
        auto rep = [&](const Vec& v) {
          Vec r(K * N);
          for (int i = 0; i < K; ++i) r.segment(N * i, N).setConstant(v[i]);
          return r;
        };
        fine.profile = PeriodProfile(rep(inst.profile.d), rep(inst.profile.ybar_plus),
                                     rep(inst.profile.ybar_minus));
        fine.prices.p_b = rep(inst.prices.p_b);
        fine.prices.p_r = rep(inst.prices.p_r);
        fine.prices.p_a = rep(inst.prices.p_a);
        fine.u_hard = refine_subgrid(inst.u_hard, {N});
        fine.u_soft = refine_subgrid(inst.u_soft, {N});
        const MarketDecision xf{rep(x.x_b), rep(x.x_r)};
        worst = std::max(
            worst, std::abs(worst_case_max_soc(xf, 25.0, fine, fine.u_hard, k * N, options.solve) - up));
        worst = std::max(
            worst, std::abs(worst_case_min_soc(xf, 25.0, fine, fine.u_hard, k * N, options.solve) - dn));
      }
    }
    out.push_back(worst_of("discretization_invariance", worst, 1e-8));
  }

  // formulation sizes
  {
    double bad = 0.0;
    for (int K : {1, 2, 3, 4, 5, 6, 7, 8, 48}) {
      if (paper_variable_count(K) != 4L * K * K + 7 * K + 1) bad += 1.0;
      if (paper_constraint_count(K) != 5L * K * K + 15 * K + 4) bad += 1.0;
      const long upper = 4L * K * (K - 1) / 2;
      if (physical_variable_count(K) + upper != paper_variable_count(K)) bad += 1.0;
      if (physical_constraint_count(K) + 2L * K + dual_block_variable_count(K) !=
          paper_constraint_count(K))
        bad += 1.0;
    }
    out.push_back(worst_of("size_formulas", bad, 0.0));
  }

  // variance bound on a full enumeration
  {
    const int K = std::min(12, options.max_k);
    const UncertaintyWindowSpec spec(0.5, 2.5, 0.5, K);
    const VarianceReport rep = check_variance_bound(spec, {}, options.enumeration_cap);
    out.push_back(worst_of("variance_bound", rep.max_variance, rep.bound));
    out.push_back(worst_of("variance_relaxed_attained", rep.relaxed_attained ? 0.0 : 1.0, 0.0));
  }

  // dual tightness at solved instances
  {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const int K = 3 + static_cast<int>(rng() % 3);
      const ProblemInstance inst = verify_instance(rng, K);
      const SolvedDay day = solve_day(inst, options.solve);
      if (day.status != SolveStatus::Optimal) {
        worst = std::numeric_limits<double>::infinity();
        break;
      }
      const Vec w_max = inst.battery.eta_plus * day.decision.x_r;
      const Vec w_min = min_soc_weights(day.decision, inst.battery);
      for (int k = 0; k <= K; ++k) {
        worst = std::max(worst,
                         check_dual_tightness(inst.u_hard, w_max, w_max, k, options.solve).observed);
        worst = std::max(worst,
                         check_dual_tightness(inst.u_hard, w_min, w_min, k, options.solve).observed);
      }
    }
    out.push_back(worst_of("dual_tightness", worst, 1e-8));
  }

  // exhaustive scenario soundness and robust feasibility of LP decisions
  {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const int K = 3 + static_cast<int>(rng() % 3);
      const ProblemInstance inst = verify_instance(rng, K);
      const SolvedDay day = solve_day(inst, options.solve);
      if (day.status != SolveStatus::Optimal) continue;
      worst = std::max(worst, verify_robust_feasibility(day.decision, inst, options.solve).max_violation);
      for (const Vec& s : enumerate_binary_scenarios(inst.u_hard, options.enumeration_cap)) {
        for (double y0 : {inst.y0_hard.lo, inst.y0_hard.hi}) {
          const Vec up =
              soc_trajectory(day.decision, s, y0, inst.battery, inst.profile.d, inst.horizon.dt);
          const Vec dn =
              soc_trajectory(day.decision, -s, y0, inst.battery, inst.profile.d, inst.horizon.dt);
          worst = std::max(worst, up.maxCoeff() - inst.battery.y_max);
          worst = std::max(worst, inst.battery.y_min - dn.minCoeff());
        }
      }
    }
    out.push_back(worst_of("scenario_soundness", worst, 1e-6));
  }

  // one-day delivery guarantee at simulation resolution
  {
    double worst = 0.0;
    const ProblemInstance inst = verify_instance(rng, 6);
    const SolvedDay day = solve_day(inst, options.solve);
    if (day.status == SolveStatus::Optimal) {
      const Vec stress_up =
          worst_case_weighted_sum(inst.u_hard, inst.battery.eta_plus * day.decision.x_r, 6).argmax;
      const Vec stress_dn =
          worst_case_weighted_sum(inst.u_hard, min_soc_weights(day.decision, inst.battery), 6).argmax;
      std::vector<Vec> traces = {lift_to_trace(stress_up, 180), lift_to_trace(-stress_dn, 180)};
      for (int i = 0; i < 10; ++i) {
        const Vec s = random_scenario_in(inst.u_hard, rng);
        traces.push_back(lift_to_trace(s, 180));
      }
      for (const Vec& trace : traces)
        for (double y0 : {inst.y0_hard.lo, inst.y0_hard.hi}) {
          const auto res = simulate_day(day.decision, trace, inst, {}, y0);
          worst = std::max({worst, res.row.undelivered_kwh, res.row.shortfall_kwh});
        }
    } else {
      worst = std::numeric_limits<double>::infinity();
    }
    out.push_back(worst_of("delivery_guarantee", worst, 1e-6));
  }

  // restriction ordering and solution certificates
  {
    double worst = 0.0, cert_bad = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const int K = 3 + static_cast<int>(rng() % 3);
      const ProblemInstance inst = verify_instance(rng, K);
      const LPModel lp = assemble_lp(inst);
      const SolveResult raw = solve(lp, options.solve);
      if (raw.status != SolveStatus::Optimal) {
        worst = std::numeric_limits<double>::infinity();
        continue;
      }
      if (!certify(lp, raw, options.solve).ok) cert_bad += 1.0;
      const SolvedDay no_reg = solve_day(inst, options.solve, true);
      worst = std::max(worst, raw.objective - no_reg.objective);
    }
    out.push_back(worst_of("restriction_ordering", worst, 1e-9));
    out.push_back(worst_of("solution_certificates", cert_bad, 0.0));
  }

  return out;
}

void write_check_csv(const std::vector<CheckResult>& checks, std::ostream& os,
                     const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << "\n";
  os << "check,pass,observed,bound,detail\n";
  for (const auto& c : checks)
    os << c.id << ',' << (c.pass ? 1 : 0) << ',' << c.observed << ',' << c.bound << ",\""
       << c.detail << "\"\n";
}

}  // namespace v2g
