#pragma once

#include <string>
#include <vector>

#include "v2g/data.hpp"
#include "v2g/robust_lp.hpp"

namespace v2g {

enum class PenaltyMode { Financial, Exclusion };

// Sanctions for undelivered regulation power and unmet driving demand.
// Financial mode prices undelivered regulation energy at k_pen times the
// availability price; exclusion mode bans further reserve bids instead.
// Driving shortfalls are bought instantly at p_y in both modes.
struct PenaltyPolicy {
  PenaltyMode mode = PenaltyMode::Financial;
  double k_pen = 5.0;
  double p_y = 7.50;  // EUR/kWh

  void validate() const {
    if (k_pen < 0.0 || p_y < 0.0)
      throw std::invalid_argument("PenaltyPolicy: penalties must be nonnegative");
  }
};

/// Simulation resolution; the step must divide the trading interval.
struct SimClock {
  int step_s = 10;

  int steps_per_interval(double dt_h) const {
    const double steps = dt_h * 3600.0 / step_s;
    const int n = static_cast<int>(std::llround(steps));
    if (n < 1 || std::abs(steps - n) > 1e-9)
      throw std::invalid_argument("SimClock: step must divide the trading interval");
    return n;
  }
};

struct DayLedgerRow {
  CivilDate date;
  double energy_cost = 0.0;      // purchases plus realized delivery settlement (EUR)
  double revenue = 0.0;          // availability payments (EUR)
  double penalty = 0.0;          // non-delivery penalties plus driving backup cost (EUR)
  double shortfall_kwh = 0.0;    // unmet driving energy
  double undelivered_kwh = 0.0;  // regulation energy not delivered or consumed
  int violations = 0;            // trading intervals with meaningful undelivered energy
  double soc_end = 0.0;          // kWh at midnight
  bool excluded = false;
  double lp_objective = 0.0;         // planning objective of the committed decision
  double lp_objective_no_reg = 0.0;  // same instance with x_r fixed to zero

  double net_cost() const { return energy_cost - revenue + penalty; }
};

// Planning context of one ledgered day, kept for offline re-verification.
struct DayContext {
  int day_index = 0;             // index into Dataset::days
  ProblemInstance planning_inst; // instance the decision was solved on
  MarketDecision decision;
};

struct BacktestLedger {
  std::vector<DayLedgerRow> strategy;
  std::vector<DayLedgerRow> baseline;  // same pipeline with x_r == 0
  Vec cumulative_value;                // running sum of baseline minus strategy net cost
  std::vector<DayContext> contexts;    // filled when requested in the options

  void finalize();  // fills cumulative_value from the rows
};

enum class ScenarioVariant {
  Nominal,
  Lossless,             // eta = 1 in training and testing
  MisspecifiedLosses,   // trained lossless, tested with nominal efficiencies
  WeakRobustExclusion,  // trained on the soft set, exclusion sanction
  WeakRobustPenalty,    // trained on the soft set, financial sanction
  Unidirectional,       // discharge limit forced to zero
};

ScenarioVariant variant_from_string(const std::string& name);
std::string to_string(ScenarioVariant variant);

// Calibration grid for the terminal-target parameters: p* in {(1+k)/20} and
// y* at fractions {1/2 + l/30} of the usable battery range.
struct CalibrationGrid {
  std::vector<double> p_star_values = {0.10, 0.15, 0.20, 0.25, 0.30};
  std::vector<double> y_star_fracs = {0.5, 0.5 + 1.0 / 30, 0.5 + 2.0 / 30,
                                      0.5 + 3.0 / 30, 0.5 + 4.0 / 30, 0.5 + 5.0 / 30};

  double y_star_kwh(double frac, const BatteryParams& battery) const {
    return battery.y_min + frac * (battery.y_max - battery.y_min);
  }
};

struct DaySimResult {
  DayLedgerRow row;
  Vec soc_trace;  // state of charge after every simulation step
};

// High-resolution simulation of one day under a committed decision and an
// actual deviation trace. Delivered grid flow is clipped so power stays
// within the charger limits and the state of charge within the battery
// bounds; the gap to the desired flow accrues penalties per the policy.
DaySimResult simulate_day(const MarketDecision& decision, const Vec& delta_trace,
                          const ProblemInstance& inst, const PenaltyPolicy& policy, double y_start,
                          const SimClock& clock = {});

// Planning-model bounds for the state of charge at the end of a committed
// tail of the day (noon to midnight): hard and soft confidence intervals
// for the next day's initial state, clipped to the battery range.
std::pair<SoCInterval, SoCInterval> noon_intervals(double y_noon, const MarketDecision& committed_tail,
                                                   const ProblemInstance& inst, int tail_start,
                                                   const SolveSettings& settings = {});

/// Piecewise-constant 10-s trace lifting an interval scenario.
Vec lift_to_trace(const Vec& scenario, int steps_per_interval);

// Trace lifting a binary scenario with a sign applied per interval:
// sign +1 stresses the upper state-of-charge bound, -1 the lower one.
Vec adversarial_trace(const UncertaintyWindowSpec& spec, const Vec& binary_scenario, double sign,
                      const SimClock& clock, double dt_h);

struct BacktestOptions {
  bool run_baseline = true;
  bool keep_contexts = false;  // retain per-day planning instances and decisions
  int max_days = -1;           // cap on ledgered days, -1 = all
  SolveSettings solve;
};

// Rolling-horizon backtest: each day at noon the next day's decisions are
// computed from the noon state of charge and the committed tail, then the
// day is simulated against the actual trace and settled. The first noon
// state is anchored at the target state of charge y*.
BacktestLedger run_backtest(const Dataset& dataset, ScenarioVariant variant,
                            const PenaltyPolicy& policy, const TerminalTarget& target,
                            const NominalDefaults& params, const BacktestOptions& options = {});

struct CalibrationResult {
  double p_star = 0.0;
  double y_star = 0.0;
  double best_profit = 0.0;
  struct Cell {
    double p_star, y_star, profit;
  };
  std::vector<Cell> table;
};

// Backtests every grid point on the training data and picks the most
// profitable tuple; ties prefer smaller p*, then smaller y*.
CalibrationResult calibrate(const Dataset& train, const CalibrationGrid& grid,
                            ScenarioVariant variant, const PenaltyPolicy& policy,
                            const NominalDefaults& params, const BacktestOptions& options = {});

/// |a - b| / mean(a, b): the regret measure used for calibration stability.
double regret(double a, double b);

void write_ledger_csv(const BacktestLedger& ledger, std::ostream& os,
                      const std::string& header_comment = {});
void write_cumulative_csv(const BacktestLedger& ledger, std::ostream& os,
                          const std::string& header_comment = {});

}  // namespace v2g
