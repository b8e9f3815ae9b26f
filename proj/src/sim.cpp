#include "v2g/sim.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace v2g {

namespace {

constexpr double kStepTol = 1e-9;       // kWh, per-step delivery noise floor
constexpr double kViolationKwh = 1e-6;  // kWh per interval counted as a violation

}  // namespace

DaySimResult simulate_day(const MarketDecision& decision, const Vec& delta_trace,
                          const ProblemInstance& inst, const PenaltyPolicy& policy, double y_start,
                          const SimClock& clock) {
  policy.validate();
  const int K = inst.horizon.K;
  const int spi = clock.steps_per_interval(inst.horizon.dt);
  if (decision.size() != K)
    throw std::invalid_argument("simulate_day: decision length must equal K");
  if (delta_trace.size() != static_cast<Eigen::Index>(K) * spi)
    throw std::invalid_argument("simulate_day: trace length must equal K * steps_per_interval");
  if (y_start < inst.battery.y_min - 1e-9 || y_start > inst.battery.y_max + 1e-9)
    throw std::invalid_argument("simulate_day: start state of charge out of range");

  const double dt_s = inst.horizon.dt / spi;  // hours per step
  const double y_lo = inst.battery.y_min, y_hi = inst.battery.y_max;
  const double eta_p = inst.battery.eta_plus, eta_m = inst.battery.eta_minus;

  DaySimResult res;
  res.soc_trace.resize(static_cast<Eigen::Index>(K) * spi);
  double y = std::clamp(y_start, y_lo, y_hi);

  for (int k = 0; k < K; ++k) {
    const double x_b = decision.x_b[k], x_r = decision.x_r[k];
    const double d_k = inst.profile.d[k];
    double undelivered_interval = 0.0;

    for (int s = 0; s < spi; ++s) {
      const double delta = delta_trace[k * spi + s];

      // driving drains the battery directly
      if (d_k > 0.0) {
        const double want = d_k * dt_s;
        const double take = std::min(want, y - y_lo);
        y -= take;
        const double miss = want - take;
        if (miss > kStepTol) {
          res.row.shortfall_kwh += miss;
          res.row.penalty += policy.p_y * miss;
        }
      }

      // desired grid flow, clipped by charger power and battery headroom
      const double g = x_b + delta * x_r;
      double g_hat = std::clamp(g, -inst.profile.ybar_minus[k], inst.profile.ybar_plus[k]);
      if (g_hat > 0.0) {
        const double max_charge = (y_hi - y) / (eta_p * dt_s);
        g_hat = std::min(g_hat, std::max(max_charge, 0.0));
        y += eta_p * g_hat * dt_s;
      } else if (g_hat < 0.0) {
        const double max_discharge = (y - y_lo) * eta_m / dt_s;  // grid-side kW
        g_hat = -std::min(-g_hat, std::max(max_discharge, 0.0));
        y += g_hat * dt_s / eta_m;
      }
      y = std::clamp(y, y_lo, y_hi);

      const double miss_kwh = std::abs(g - g_hat) * dt_s;
      if (miss_kwh > kStepTol) {
        undelivered_interval += miss_kwh;
        if (policy.mode == PenaltyMode::Financial)
          res.row.penalty += policy.k_pen * inst.prices.p_a[k] * miss_kwh;
        else
          res.row.excluded = true;
      }

      // settlement: committed purchases, availability revenue, delivery price
      res.row.energy_cost += inst.prices.p_b[k] * x_b * dt_s;
      res.row.revenue += inst.prices.p_a[k] * x_r * dt_s;
      if (inst.prices.p_d) res.row.energy_cost += delta * x_r * (*inst.prices.p_d)[k] * dt_s;

      res.soc_trace[k * spi + s] = y;
    }

    res.row.undelivered_kwh += undelivered_interval;
    if (undelivered_interval > kViolationKwh) ++res.row.violations;
  }
  res.row.soc_end = y;
  return res;
}

namespace {

// sub-day planning instance covering intervals [from, K)
ProblemInstance tail_instance(const ProblemInstance& full, int from) {
  const int K = full.horizon.K;
  if (from < 0 || from >= K) throw std::invalid_argument("tail_instance: bad split point");
  const int Kt = K - from;
  ProblemInstance t;
  t.grid = full.grid;
  t.battery = full.battery;
  t.horizon = HorizonSpec::from_intervals(Kt, full.horizon.dt);
  t.profile = PeriodProfile(full.profile.d.tail(Kt), full.profile.ybar_plus.tail(Kt),
                            full.profile.ybar_minus.tail(Kt));
  t.prices.p_b = full.prices.p_b.tail(Kt);
  t.prices.p_r = full.prices.p_r.tail(Kt);
  t.prices.p_a = full.prices.p_a.tail(Kt);
  t.target = full.target;
  const double mid = 0.5 * (full.battery.y_min + full.battery.y_max);
  t.y0_hard = {mid, mid};
  t.y0_soft = {mid, mid};
  t.u_hard = UncertaintyWindowSpec(full.u_hard.gamma, full.u_hard.Gamma, full.horizon.dt, Kt);
  t.u_soft = UncertaintyWindowSpec(full.u_soft.gamma, full.u_soft.Gamma, full.horizon.dt, Kt);
  return t;
}

}  // namespace

std::pair<SoCInterval, SoCInterval> noon_intervals(double y_noon, const MarketDecision& committed_tail,
                                                   const ProblemInstance& inst, int tail_start,
                                                   const SolveSettings& settings) {
  const ProblemInstance tail = tail_instance(inst, tail_start);
  const int Kt = tail.horizon.K;
  if (committed_tail.size() != Kt)
    throw std::invalid_argument("noon_intervals: committed tail must cover the remaining horizon");

  auto clip = [&](double v) { return std::clamp(v, inst.battery.y_min, inst.battery.y_max); };
  SoCInterval hard{
      clip(worst_case_min_soc(committed_tail, y_noon, tail, tail.u_hard, Kt, settings)),
      clip(worst_case_max_soc(committed_tail, y_noon, tail, tail.u_hard, Kt, settings))};
  SoCInterval soft{
      clip(worst_case_min_soc(committed_tail, y_noon, tail, tail.u_soft, Kt, settings)),
      clip(worst_case_max_soc(committed_tail, y_noon, tail, tail.u_soft, Kt, settings))};
  return {hard, soft};
}

Vec lift_to_trace(const Vec& scenario, int steps_per_interval) {
  Vec trace(scenario.size() * steps_per_interval);
  for (Eigen::Index k = 0; k < scenario.size(); ++k)
    trace.segment(k * steps_per_interval, steps_per_interval).setConstant(scenario[k]);
  return trace;
}

Vec adversarial_trace(const UncertaintyWindowSpec& spec, const Vec& binary_scenario, double sign,
                      const SimClock& clock, double dt_h) {
  if (!contains(spec, binary_scenario))
    throw std::invalid_argument("adversarial_trace: scenario outside the uncertainty set");
  return lift_to_trace(sign * binary_scenario, clock.steps_per_interval(dt_h));
}

ScenarioVariant variant_from_string(const std::string& name) {
  if (name == "nominal") return ScenarioVariant::Nominal;
  if (name == "lossless") return ScenarioVariant::Lossless;
  if (name == "misspecified_losses") return ScenarioVariant::MisspecifiedLosses;
  if (name == "weak_robust_exclusion") return ScenarioVariant::WeakRobustExclusion;
  if (name == "weak_robust_penalty") return ScenarioVariant::WeakRobustPenalty;
  if (name == "unidirectional") return ScenarioVariant::Unidirectional;
  throw std::invalid_argument("unknown scenario variant '" + name + "'");
}

std::string to_string(ScenarioVariant variant) {
  switch (variant) {
    case ScenarioVariant::Nominal: return "nominal";
    case ScenarioVariant::Lossless: return "lossless";
    case ScenarioVariant::MisspecifiedLosses: return "misspecified_losses";
    case ScenarioVariant::WeakRobustExclusion: return "weak_robust_exclusion";
    case ScenarioVariant::WeakRobustPenalty: return "weak_robust_penalty";
    case ScenarioVariant::Unidirectional: return "unidirectional";
  }
  throw std::logic_error("unreachable");
}

void BacktestLedger::finalize() {
  cumulative_value.resize(strategy.size());
  double cum = 0.0;
  for (size_t i = 0; i < strategy.size(); ++i) {
    const double base = i < baseline.size() ? baseline[i].net_cost() : 0.0;
    cum += base - strategy[i].net_cost();
    cumulative_value[i] = cum;
  }
}

namespace {

struct VariantConfig {
  BatteryParams train_battery, test_battery;
  bool weak_robust = false;
  bool unidirectional = false;
};

VariantConfig resolve_variant(ScenarioVariant variant, const NominalDefaults& params) {
  VariantConfig v;
  v.train_battery = params.battery;
  v.test_battery = params.battery;
  switch (variant) {
    case ScenarioVariant::Lossless:
      v.train_battery.eta_plus = v.train_battery.eta_minus = 1.0;
      v.test_battery = v.train_battery;
      break;
    case ScenarioVariant::MisspecifiedLosses:
      v.train_battery.eta_plus = v.train_battery.eta_minus = 1.0;
      break;
    case ScenarioVariant::WeakRobustExclusion:
    case ScenarioVariant::WeakRobustPenalty:
      v.weak_robust = true;
      break;
    case ScenarioVariant::Unidirectional:
      v.unidirectional = true;
      break;
    case ScenarioVariant::Nominal:
      break;
  }
  return v;
}

ProblemInstance day_instance(const DayData& day, const HorizonSpec& horizon,
                             const BatteryParams& battery, const UncertaintyWindowSpec& hard,
                             const UncertaintyWindowSpec& soft, const TerminalTarget& target,
                             const SoCInterval& y0_hard, const SoCInterval& y0_soft,
                             bool unidirectional) {
  ProblemInstance inst;
  inst.battery = battery;
  inst.horizon = horizon;
  inst.profile = PeriodProfile(day.driving, day.ybar_plus,
                               unidirectional ? Vec(Vec::Zero(horizon.K)) : day.ybar_minus);
  inst.prices = day.prices;
  if (day.delivery_price_trace) {
    const int spi = static_cast<int>(day.delivery_price_trace->size()) / horizon.K;
    inst.prices.p_d = interval_average_delta(*day.delivery_price_trace, spi);
  }
  inst.target = target;
  inst.y0_hard = y0_hard;
  inst.y0_soft = y0_soft;
  inst.u_hard = hard;
  inst.u_soft = soft;
  inst.validate();
  return inst;
}

}  // namespace

BacktestLedger run_backtest(const Dataset& dataset, ScenarioVariant variant,
                            const PenaltyPolicy& policy_in, const TerminalTarget& target,
                            const NominalDefaults& params, const BacktestOptions& options) {
  if (dataset.days.size() < 2)
    throw std::invalid_argument("run_backtest: need at least two dataset days");
  const HorizonSpec horizon = dataset.horizon;
  const int K = horizon.K;
  const double noon_frac = 12.0 / horizon.dt;
  const int noon_idx = static_cast<int>(std::llround(noon_frac));
  if (std::abs(noon_frac - noon_idx) > 1e-9 || noon_idx <= 0 || noon_idx >= K)
    throw std::invalid_argument("run_backtest: noon must fall on the trading grid");

  const VariantConfig vc = resolve_variant(variant, params);
  PenaltyPolicy policy = policy_in;
  if (variant == ScenarioVariant::WeakRobustExclusion) policy.mode = PenaltyMode::Exclusion;
  if (variant == ScenarioVariant::WeakRobustPenalty) policy.mode = PenaltyMode::Financial;

  const UncertaintyWindowSpec hard_true = params.hard_window();
  const UncertaintyWindowSpec soft = params.soft_window();
  const UncertaintyWindowSpec hard_train = vc.weak_robust ? soft : hard_true;
  const SimClock clock{dataset.step_s};
  const int spi = clock.steps_per_interval(horizon.dt);

  const int total_days = static_cast<int>(dataset.days.size());
  const int ledger_days =
      options.max_days > 0 ? std::min(options.max_days, total_days - 1) : total_days - 1;

  // one pass of the rolling-horizon procedure; baseline forces x_r = 0
  auto run_pass = [&](bool no_regulation, std::vector<DayLedgerRow>& rows,
                      std::vector<DayContext>* contexts) {
    bool excluded = false;

    // bootstrap: noon of day 0 anchored at the target state of charge
    double y_noon = target.y_star;
    MarketDecision committed_tail = MarketDecision::zero(K - noon_idx);
    ProblemInstance planning_day0 =
        day_instance(dataset.days[0], horizon, vc.train_battery, hard_train, soft, target,
                     {params.battery.y_min, params.battery.y_max},
                     {params.battery.y_min, params.battery.y_max}, vc.unidirectional);

    MarketDecision next_decision;
    double next_obj = 0.0, next_obj_noreg = 0.0;
    SoCInterval next_hard{}, next_soft{};
    ProblemInstance next_inst;
    auto solve_next = [&](const ProblemInstance& planning_today, int day_index) {
      auto [hard_iv, soft_iv] =
          noon_intervals(y_noon, committed_tail, planning_today, noon_idx, options.solve);
      const ProblemInstance inst =
          day_instance(dataset.days[day_index], horizon, vc.train_battery, hard_train, soft,
                       target, hard_iv, soft_iv, vc.unidirectional);
      const bool force_no_reg = no_regulation || excluded;
      SolvedDay sd = solve_day(inst, options.solve, force_no_reg);
      if (sd.status != SolveStatus::Optimal)
        throw std::runtime_error("run_backtest: planning LP not optimal on day " +
                                 format_date(dataset.days[day_index].date));
      SolvedDay sd_noreg =
          force_no_reg ? sd : solve_day(inst, options.solve, /*no_regulation=*/true);
      next_decision = sd.decision;
      if (excluded) next_decision.x_r.setZero();
      next_obj = sd.objective;
      next_obj_noreg = sd_noreg.objective;
      next_hard = hard_iv;
      next_soft = soft_iv;
      next_inst = inst;
    };
    solve_next(planning_day0, 1);

    // midnight state: simulate the tail of day 0 under zero commitments
    double y_mid;
    {
      const ProblemInstance tail = tail_instance(
          day_instance(dataset.days[0], horizon, vc.test_battery, hard_true, soft, target,
                       {params.battery.y_min, params.battery.y_max},
                       {params.battery.y_min, params.battery.y_max}, vc.unidirectional),
          noon_idx);
      const Vec tail_trace = dataset.days[0].delta_trace.tail((K - noon_idx) * spi);
      y_mid = simulate_day(MarketDecision::zero(K - noon_idx), tail_trace, tail, policy, y_noon,
                           clock)
                  .row.soc_end;
    }

    for (int i = 1; i <= ledger_days; ++i) {
      const DayData& day = dataset.days[i];
      MarketDecision decision = next_decision;
      const double lp_obj = next_obj, lp_obj_noreg = next_obj_noreg;
      const SoCInterval hard_iv = next_hard, soft_iv = next_soft;
      if (contexts) contexts->push_back({i, next_inst, decision});

      const ProblemInstance test_inst =
          day_instance(day, horizon, vc.test_battery, hard_true, soft, target, hard_iv, soft_iv,
                       vc.unidirectional);
      DaySimResult sim = simulate_day(decision, day.delta_trace, test_inst, policy, y_mid, clock);
      sim.row.date = day.date;
      sim.row.lp_objective = lp_obj;
      sim.row.lp_objective_no_reg = lp_obj_noreg;
      y_mid = sim.row.soc_end;

      if (policy.mode == PenaltyMode::Exclusion && sim.row.excluded) excluded = true;
      sim.row.excluded = excluded;

      // noon of day i: commit day i+1 (the simulated noon state feeds the
      // confidence intervals; commitments for the rest of day i stand)
      if (i + 1 <= ledger_days) {
        y_noon = sim.soc_trace[static_cast<Eigen::Index>(noon_idx) * spi - 1];
        committed_tail = {decision.x_b.tail(K - noon_idx), decision.x_r.tail(K - noon_idx)};
        const ProblemInstance planning_today =
            day_instance(day, horizon, vc.train_battery, hard_train, soft, target, hard_iv,
                         soft_iv, vc.unidirectional);
        solve_next(planning_today, i + 1);
      }

      rows.push_back(sim.row);
    }
  };

  BacktestLedger ledger;
  run_pass(false, ledger.strategy, options.keep_contexts ? &ledger.contexts : nullptr);
  if (options.run_baseline) run_pass(true, ledger.baseline, nullptr);
  ledger.finalize();
  return ledger;
}

CalibrationResult calibrate(const Dataset& train, const CalibrationGrid& grid,
                            ScenarioVariant variant, const PenaltyPolicy& policy,
                            const NominalDefaults& params, const BacktestOptions& options) {
  CalibrationResult result;
  bool first = true;
  BacktestOptions opts = options;
  opts.run_baseline = false;  // calibration ranks strategies by their own profit
  for (const double p_star : grid.p_star_values) {
    for (const double frac : grid.y_star_fracs) {
      const double y_star = grid.y_star_kwh(frac, params.battery);
      const TerminalTarget target{y_star, p_star};
      const BacktestLedger ledger = run_backtest(train, variant, policy, target, params, opts);
      double profit = 0.0;
      for (const auto& row : ledger.strategy) profit -= row.net_cost();
      result.table.push_back({p_star, y_star, profit});
      if (first || profit > result.best_profit + 1e-12) {
        first = false;
        result.best_profit = profit;
        result.p_star = p_star;
        result.y_star = y_star;
      }
    }
  }
  return result;
}

double regret(double a, double b) {
  const double mean = 0.5 * (a + b);
  if (mean == 0.0) return 0.0;
  return std::abs(a - b) / std::abs(mean);
}

void write_ledger_csv(const BacktestLedger& ledger, std::ostream& os,
                      const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << "\n";
  os << "date,cost,revenue,penalty,shortfall_kwh,violations,soc_end,excluded,cum_value\n";
  for (size_t i = 0; i < ledger.strategy.size(); ++i) {
    const auto& r = ledger.strategy[i];
    os << format_date(r.date) << ',' << r.energy_cost << ',' << r.revenue << ',' << r.penalty
       << ',' << r.shortfall_kwh << ',' << r.violations << ',' << r.soc_end << ','
       << (r.excluded ? 1 : 0) << ','
       << (i < static_cast<size_t>(ledger.cumulative_value.size()) ? ledger.cumulative_value[i]
                                                                   : 0.0)
       << "\n";
  }
}

void write_cumulative_csv(const BacktestLedger& ledger, std::ostream& os,
                          const std::string& header_comment) {
  if (!header_comment.empty()) os << "# " << header_comment << "\n";
  os << "date,metric,value\n";
  for (size_t i = 0; i < ledger.strategy.size(); ++i)
    os << format_date(ledger.strategy[i].date) << ",cum_value_eur,"
       << (i < static_cast<size_t>(ledger.cumulative_value.size()) ? ledger.cumulative_value[i]
                                                                   : 0.0)
       << "\n";
}

}  // namespace v2g
