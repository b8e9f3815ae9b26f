// Command-line front end: day-ahead solving, backtesting, calibration,
// verification, sensitivity sweeps and LP export.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "v2g/robust_lp.hpp"
#include "v2g/sim.hpp"
#include "v2g/verify.hpp"
#include "v2g/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace v2g;

namespace {

struct AppConfig {
  NominalDefaults params;
  PenaltyPolicy policy;
  TariffCalendar calendar;
  DrivingSchedule driving = DrivingSchedule::commuter_default();
  SynthSpec synth;
  SolveSettings solve;
  CalibrationGrid grid;
  std::string external_cmd;  // e.g. "mysolver {mps} {sol}"
  uint64_t hash = 0;
};

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

AppConfig load_config(const std::string& path) {
  AppConfig cfg;
  cfg.synth.params = cfg.params;
  if (path.empty()) {
    cfg.hash = fnv1a("default");
    return cfg;
  }
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  cfg.hash = fnv1a(text);
  const json j = json::parse(text);

  if (j.contains("battery")) {
    const auto& b = j["battery"];
    cfg.params.battery.y_min = b.value("y_min", cfg.params.battery.y_min);
    cfg.params.battery.y_max = b.value("y_max", cfg.params.battery.y_max);
    cfg.params.battery.eta_plus = b.value("eta_plus", cfg.params.battery.eta_plus);
    cfg.params.battery.eta_minus = b.value("eta_minus", cfg.params.battery.eta_minus);
    cfg.params.battery.validate();
  }
  if (j.contains("grid")) {
    cfg.params.grid.f0 = j["grid"].value("f0", cfg.params.grid.f0);
    cfg.params.grid.delta_f = j["grid"].value("delta_f", cfg.params.grid.delta_f);
    cfg.params.grid.validate();
  }
  cfg.params.charger_kw = j.value("charger_kw", cfg.params.charger_kw);
  cfg.params.dt = j.value("dt_hours", cfg.params.dt);
  cfg.params.horizon_h = j.value("horizon_hours", cfg.params.horizon_h);
  if (j.contains("windows")) {
    const auto& w = j["windows"];
    cfg.params.gamma = w.value("gamma", cfg.params.gamma);
    cfg.params.Gamma = w.value("Gamma", cfg.params.Gamma);
    cfg.params.gamma_hat = w.value("gamma_hat", cfg.params.gamma_hat);
    cfg.params.Gamma_hat = w.value("Gamma_hat", cfg.params.Gamma_hat);
  }
  if (j.contains("target")) {
    cfg.params.target.y_star = j["target"].value("y_star", cfg.params.target.y_star);
    cfg.params.target.p_star = j["target"].value("p_star", cfg.params.target.p_star);
  }
  if (j.contains("penalty")) {
    const auto& p = j["penalty"];
    const std::string mode = p.value("mode", std::string("financial"));
    if (mode == "financial")
      cfg.policy.mode = PenaltyMode::Financial;
    else if (mode == "exclusion")
      cfg.policy.mode = PenaltyMode::Exclusion;
    else
      throw std::runtime_error("config: penalty.mode must be financial or exclusion");
    cfg.policy.k_pen = p.value("k_pen", cfg.policy.k_pen);
    cfg.policy.p_y = p.value("p_y", cfg.policy.p_y);
    cfg.policy.validate();
  }
  if (j.contains("tariff")) {
    const auto& t = j["tariff"];
    if (t.contains("peak"))
      for (int i = 0; i < 3; ++i) cfg.calendar.peak[i] = t["peak"][i].get<double>();
    if (t.contains("offpeak"))
      for (int i = 0; i < 3; ++i) cfg.calendar.offpeak[i] = t["offpeak"][i].get<double>();
    cfg.calendar.peak_start_hour = t.value("peak_start_hour", cfg.calendar.peak_start_hour);
    cfg.calendar.peak_end_hour = t.value("peak_end_hour", cfg.calendar.peak_end_hour);
    cfg.calendar.utc_offset_hours = t.value("utc_offset_hours", cfg.calendar.utc_offset_hours);
    if (t.contains("holidays"))
      for (const auto& h : t["holidays"])
        cfg.calendar.holidays.insert(days_from_civil(parse_date(h.get<std::string>())));
  }
  if (j.contains("driving")) {
    const auto& d = j["driving"];
    if (d.contains("windows")) {
      cfg.driving.windows.clear();
      for (const auto& w : d["windows"]) {
        DrivingWindow win;
        win.weekdays = w.value("weekdays", std::vector<int>{0, 1, 2, 3, 4});
        win.start_hour = w.value("start_hour", 7.0);
        win.end_hour = w.value("end_hour", 9.0);
        win.energy_kwh = w.value("energy_kwh", 3.5);
        cfg.driving.windows.push_back(win);
      }
    }
    cfg.driving.yearly_mileage_km = d.value("yearly_mileage_km", cfg.driving.yearly_mileage_km);
    cfg.driving.efficiency_kwh_per_km =
        d.value("efficiency_kwh_per_km", cfg.driving.efficiency_kwh_per_km);
    if (d.contains("holidays"))
      for (const auto& h : d["holidays"])
        cfg.driving.holidays.insert(days_from_civil(parse_date(h.get<std::string>())));
  }
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    cfg.synth.two_level_prices = s.value("two_level_prices", cfg.synth.two_level_prices);
    cfg.synth.p_b_offpeak = s.value("p_b_offpeak", cfg.synth.p_b_offpeak);
    cfg.synth.p_b_peak = s.value("p_b_peak", cfg.synth.p_b_peak);
    cfg.synth.p_a = s.value("p_a", cfg.synth.p_a);
    cfg.synth.amplitude = s.value("amplitude", cfg.synth.amplitude);
    cfg.synth.constrain_to_soft = s.value("constrain_to_soft", cfg.synth.constrain_to_soft);
    cfg.synth.jitter = s.value("jitter", cfg.synth.jitter);
    cfg.synth.with_driving = s.value("with_driving", cfg.synth.with_driving);
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    cfg.solve.feas_tol = s.value("feas_tol", cfg.solve.feas_tol);
    cfg.solve.opt_tol = s.value("opt_tol", cfg.solve.opt_tol);
    cfg.solve.max_iters = s.value("max_iters", cfg.solve.max_iters);
    cfg.solve.validate();
  }
  cfg.external_cmd = j.value("external_solver_cmd", std::string{});
  cfg.synth.params = cfg.params;
  return cfg;
}

// writes through a temp file so readers never observe partial output
void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
  }
  fs::rename(tmp, path);
}

// External solver reached through the MPS interchange file. The command
// template must contain {mps} and {sol}; the solution file is expected to
// hold one "<column name> <value>" pair per line, with an optional leading
// "status <optimal|infeasible|unbounded>" line. Only primal values are
// recovered; row multipliers stay empty.
class ExternalMpsSolver final : public SolverBackend {
 public:
  ExternalMpsSolver(std::string cmd_template, fs::path workdir)
      : cmd_(std::move(cmd_template)), dir_(std::move(workdir)) {}

  SolveResult solve_model(const LPModel& model, const SolveSettings&) override {
    const fs::path mps = dir_ / "model.mps";
    const fs::path sol = dir_ / "model.sol";
    {
      std::ostringstream os;
      model.write_mps(os);
      atomic_write(mps, os.str());
    }
    std::string cmd = cmd_;
    replace_all(cmd, "{mps}", mps.string());
    replace_all(cmd, "{sol}", sol.string());
    if (std::system(cmd.c_str()) != 0)
      throw std::runtime_error("external solver command failed: " + cmd);

    SolveResult res;
    res.primal = Vec::Zero(model.num_vars());
    res.dual = Vec::Zero(model.num_rows());
    res.reduced_costs = Vec::Zero(model.num_vars());
    res.status = SolveStatus::Optimal;
    std::ifstream f(sol);
    if (!f) throw std::runtime_error("external solver produced no solution file");
    std::string name;
    while (f >> name) {
      if (name == "status") {
        std::string status;
        f >> status;
        if (status == "infeasible") res.status = SolveStatus::Infeasible;
        if (status == "unbounded") res.status = SolveStatus::Unbounded;
        continue;
      }
      double value;
      if (!(f >> value)) break;
      if (model.var_index().count(name)) res.primal[model.var(name)] = value;
    }
    res.objective = model.objective().dot(res.primal) + model.objective_constant;
    return res;
  }

 private:
  static void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
      s.replace(pos, from.size(), to);
  }
  std::string cmd_;
  fs::path dir_;
};

struct CommonFlags {
  std::string config_path, data_dir, out_dir = "out", backend = "bundled";
  uint64_t seed = 1;
};

Dataset resolve_dataset(const CommonFlags& flags, const AppConfig& cfg, int synth_days) {
  if (!flags.data_dir.empty())
    return load_dataset(flags.data_dir, cfg.params, cfg.calendar, cfg.driving);
  return synth_dataset(flags.seed, synth_days, cfg.synth);
}

std::string header_comment(const char* cmd, const AppConfig& cfg, const CommonFlags& flags) {
  std::ostringstream os;
  os << "v2g " << kVersion << " cmd=" << cmd << " config=" << hex16(cfg.hash)
     << " seed=" << flags.seed;
  return os.str();
}

// planning instance for one dataset day, anchored at the target state
ProblemInstance instance_for_day(const DayData& day, const AppConfig& cfg,
                                 ScenarioVariant variant) {
  const HorizonSpec horizon = cfg.params.horizon();
  BatteryParams battery = cfg.params.battery;
  if (variant == ScenarioVariant::Lossless || variant == ScenarioVariant::MisspecifiedLosses)
    battery.eta_plus = battery.eta_minus = 1.0;
  ProblemInstance inst;
  inst.grid = cfg.params.grid;
  inst.battery = battery;
  inst.horizon = horizon;
  const bool uni = variant == ScenarioVariant::Unidirectional;
  inst.profile = PeriodProfile(day.driving, day.ybar_plus,
                               uni ? Vec(Vec::Zero(horizon.K)) : day.ybar_minus);
  inst.prices = day.prices;
  inst.target = cfg.params.target;
  const double anchor = std::clamp(cfg.params.target.y_star, battery.y_min, battery.y_max);
  inst.y0_hard = {anchor, anchor};
  inst.y0_soft = {anchor, anchor};
  const bool weak = variant == ScenarioVariant::WeakRobustExclusion ||
                    variant == ScenarioVariant::WeakRobustPenalty;
  inst.u_hard = weak ? cfg.params.soft_window() : cfg.params.hard_window();
  inst.u_soft = cfg.params.soft_window();
  inst.validate();
  return inst;
}

int find_day(const Dataset& ds, const std::string& date) {
  if (date.empty()) return ds.days.size() > 1 ? 1 : 0;
  const CivilDate want = parse_date(date);
  for (size_t i = 0; i < ds.days.size(); ++i)
    if (ds.days[i].date == want) return static_cast<int>(i);
  throw std::runtime_error("date " + date + " not present in the dataset");
}

// ---------------------------------------------------------------------------

int cmd_solve_day(const CommonFlags& flags, const AppConfig& cfg, const std::string& date,
                  bool no_regulation, const std::string& variant_name) {
  const ScenarioVariant variant = variant_from_string(variant_name);
  const Dataset ds = resolve_dataset(flags, cfg, 2);
  const DayData& day = ds.days[find_day(ds, date)];
  const ProblemInstance inst = instance_for_day(day, cfg, variant);

  const LPModel lp = no_regulation ? assemble_lp_no_regulation(inst) : assemble_lp(inst);
  std::unique_ptr<SolverBackend> backend;
  if (flags.backend == "external") {
    if (cfg.external_cmd.empty())
      throw std::runtime_error("--backend external requires external_solver_cmd in the config");
    backend = std::make_unique<ExternalMpsSolver>(cfg.external_cmd, flags.out_dir);
  } else {
    backend = std::make_unique<BundledSolver>();
  }
  const SolveResult raw = backend->solve_model(lp, cfg.solve);
  const SolvedDay sol = extract_decision(lp, raw);
  if (sol.status != SolveStatus::Optimal) {
    std::cerr << "instance is "
              << (sol.status == SolveStatus::Infeasible ? "infeasible" : "not solvable")
              << ": no feasible bidding strategy under the delivery guarantee\n";
    return 1;
  }

  const auto rep = verify_robust_feasibility(sol.decision, inst, cfg.solve);
  const Vec m_closed = min_soc_weights(sol.decision, inst.battery);
  std::ostringstream os;
  os << "# " << header_comment("solve-day", cfg, flags) << " date=" << format_date(day.date)
     << "\n";
  os << "interval,x_b_kw,x_r_kw,m_kw,z_kwh,soc_min_kwh,soc_max_kwh\n";
  for (int k = 1; k <= inst.horizon.K; ++k) {
    const double lo = worst_case_min_soc(sol.decision, inst.y0_hard.lo, inst, inst.u_hard, k,
                                         cfg.solve);
    const double hi = worst_case_max_soc(sol.decision, inst.y0_hard.hi, inst, inst.u_hard, k,
                                         cfg.solve);
    os << k << ',' << sol.decision.x_b[k - 1] << ',' << sol.decision.x_r[k - 1] << ','
       << m_closed[k - 1] << ',' << sol.z << ',' << lo << ',' << hi << "\n";
  }
  atomic_write(fs::path(flags.out_dir) / "decision.csv", os.str());
  std::cout << "objective " << sol.objective << " EUR, max robust violation " << rep.max_violation
            << " kWh, decision written to " << (fs::path(flags.out_dir) / "decision.csv").string()
            << "\n";
  return 0;
}

int cmd_backtest(const CommonFlags& flags, const AppConfig& cfg, const std::string& variant_name,
                 int days) {
  const ScenarioVariant variant = variant_from_string(variant_name);
  const Dataset ds = resolve_dataset(flags, cfg, days + 1);
  BacktestOptions opts;
  opts.solve = cfg.solve;
  opts.max_days = days;
  const BacktestLedger ledger =
      run_backtest(ds, variant, cfg.policy, cfg.params.target, cfg.params, opts);

  std::ostringstream os1;
  write_ledger_csv(ledger, os1, header_comment("backtest", cfg, flags));
  atomic_write(fs::path(flags.out_dir) / "ledger.csv", os1.str());
  std::ostringstream os2;
  write_cumulative_csv(ledger, os2, header_comment("backtest", cfg, flags));
  atomic_write(fs::path(flags.out_dir) / "cumulative.csv", os2.str());

  const double value = ledger.cumulative_value.size()
                           ? ledger.cumulative_value[ledger.cumulative_value.size() - 1]
                           : 0.0;
  std::cout << "variant " << to_string(variant) << ": " << ledger.strategy.size()
            << " days, value of V2G " << value << " EUR\n";
  return 0;
}

int cmd_calibrate(const CommonFlags& flags, const AppConfig& cfg, const std::string& variant_name,
                  int days) {
  const ScenarioVariant variant = variant_from_string(variant_name);
  const Dataset ds = resolve_dataset(flags, cfg, days + 1);
  BacktestOptions opts;
  opts.solve = cfg.solve;
  opts.max_days = days;
  const CalibrationResult res = calibrate(ds, cfg.grid, variant, cfg.policy, cfg.params, opts);

  std::ostringstream os;
  os << "# " << header_comment("calibrate", cfg, flags) << "\n";
  os << "p_star,y_star,profit_eur,chosen\n";
  for (const auto& cell : res.table)
    os << cell.p_star << ',' << cell.y_star << ',' << cell.profit << ','
       << (cell.p_star == res.p_star && cell.y_star == res.y_star ? 1 : 0) << "\n";
  atomic_write(fs::path(flags.out_dir) / "calibration.csv", os.str());
  std::cout << "chosen p_star=" << res.p_star << " y_star=" << res.y_star << " profit "
            << res.best_profit << " EUR\n";
  return 0;
}

int cmd_verify(const CommonFlags& flags, const AppConfig& cfg, int enum_k) {
  if (enum_k > 20) {
    std::cerr << "refusing enumeration with K=" << enum_k
              << ": the cap is 20 (2^20 membership checks)\n";
    return 2;
  }
  VerifyOptions opts;
  opts.seed = flags.seed;
  opts.max_k = enum_k;
  opts.solve = cfg.solve;
  const auto checks = run_verification(opts);
  std::ostringstream os;
  write_check_csv(checks, os, header_comment("verify", cfg, flags));
  atomic_write(fs::path(flags.out_dir) / "verify.csv", os.str());

  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.id << " (observed " << c.observed
              << ", bound " << c.bound << ")\n";
    if (!c.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

int cmd_sweep(const CommonFlags& flags, const AppConfig& cfg,
              const std::vector<std::string>& axis_specs, const std::string& mode, int days) {
  if (axis_specs.empty()) throw std::runtime_error("sweep: provide at least one --axis");
  struct Axis {
    std::string name;
    std::vector<double> values;
  };
  std::vector<Axis> axes;
  for (const auto& spec : axis_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("sweep: --axis expects name=v1,v2,... got '" + spec + "'");
    Axis axis;
    axis.name = spec.substr(0, eq);
    const std::set<std::string> known = {"charger_kw", "battery_kwh", "activation_ratio",
                                         "mileage_km", "k_pen", "p_y"};
    if (!known.count(axis.name)) throw std::runtime_error("sweep: unknown axis " + axis.name);
    std::istringstream is(spec.substr(eq + 1));
    std::string tok;
    while (std::getline(is, tok, ',')) axis.values.push_back(std::stod(tok));
    if (axis.values.empty()) throw std::runtime_error("sweep: empty axis " + axis.name);
    axes.push_back(std::move(axis));
  }

  std::ostringstream os;
  os << "# " << header_comment("sweep", cfg, flags) << " mode=" << mode << "\n";
  for (const auto& a : axes) os << a.name << ',';
  os << "value_eur\n";

  std::vector<size_t> idx(axes.size(), 0);
  bool done = false;
  while (!done) {
    AppConfig point = cfg;
    for (size_t a = 0; a < axes.size(); ++a) {
      const double v = axes[a].values[idx[a]];
      if (axes[a].name == "charger_kw") point.params.charger_kw = v;
      if (axes[a].name == "battery_kwh")
        point.params.battery.y_max = point.params.battery.y_min + v;
      if (axes[a].name == "activation_ratio")
        point.params.Gamma = point.params.gamma / v;
      if (axes[a].name == "mileage_km") {
        const double scale = v / point.driving.yearly_mileage_km;
        for (auto& w : point.driving.windows) w.energy_kwh *= scale;
        point.driving.yearly_mileage_km = v;
      }
      if (axes[a].name == "k_pen") point.policy.k_pen = v;
      if (axes[a].name == "p_y") point.policy.p_y = v;
    }
    point.params.target.y_star = std::clamp(point.params.target.y_star,
                                            point.params.battery.y_min,
                                            point.params.battery.y_max);
    point.synth.params = point.params;

    double value = 0.0;
    const Dataset ds = resolve_dataset(flags, point, days + 1);
    if (mode == "planning") {
      const int use_days = std::min<int>(days, static_cast<int>(ds.days.size()));
      for (int i = 0; i < use_days; ++i) {
        const ProblemInstance inst =
            instance_for_day(ds.days[i], point, ScenarioVariant::Nominal);
        const SolvedDay with_reg = solve_day(inst, point.solve);
        const SolvedDay no_reg = solve_day(inst, point.solve, true);
        if (with_reg.status != SolveStatus::Optimal || no_reg.status != SolveStatus::Optimal)
          throw std::runtime_error("sweep: planning LP not optimal");
        value += no_reg.objective - with_reg.objective;
      }
    } else if (mode == "backtest") {
      BacktestOptions opts;
      opts.solve = point.solve;
      opts.max_days = days;
      const BacktestLedger ledger = run_backtest(ds, ScenarioVariant::Nominal, point.policy,
                                                 point.params.target, point.params, opts);
      value = ledger.cumulative_value.size()
                  ? ledger.cumulative_value[ledger.cumulative_value.size() - 1]
                  : 0.0;
    } else {
      throw std::runtime_error("sweep: mode must be planning or backtest");
    }

    for (size_t a = 0; a < axes.size(); ++a) os << axes[a].values[idx[a]] << ',';
    os << value << "\n";

    // advance the cartesian product
    done = true;
    for (size_t a = 0; a < axes.size(); ++a) {
      if (++idx[a] < axes[a].values.size()) {
        done = false;
        break;
      }
      idx[a] = 0;
    }
  }
  atomic_write(fs::path(flags.out_dir) / "sweep.csv", os.str());
  std::cout << "sweep written to " << (fs::path(flags.out_dir) / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_export_lp(const CommonFlags& flags, const AppConfig& cfg, const std::string& date,
                  bool no_regulation, const std::string& variant_name) {
  const ScenarioVariant variant = variant_from_string(variant_name);
  const Dataset ds = resolve_dataset(flags, cfg, 2);
  const DayData& day = ds.days[find_day(ds, date)];
  const ProblemInstance inst = instance_for_day(day, cfg, variant);
  const LPModel lp = no_regulation ? assemble_lp_no_regulation(inst) : assemble_lp(inst);
  std::ostringstream os;
  lp.write_mps(os, "V2G_" + format_date(day.date));
  atomic_write(fs::path(flags.out_dir) / "model.mps", os.str());
  std::cout << "model with " << lp.num_vars() << " columns and " << lp.num_rows()
            << " rows written to " << (fs::path(flags.out_dir) / "model.mps").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability-guaranteed day-ahead bidding for V2G frequency regulation"};
  app.require_subcommand(1);
  app.fallthrough();  // common options may follow the subcommand

  CommonFlags flags;
  app.add_option("--config", flags.config_path, "configuration JSON (defaults when absent)");
  app.add_option("--data", flags.data_dir, "directory with CSV market data; synthetic otherwise");
  app.add_option("--out", flags.out_dir, "output directory, created if absent");
  app.add_option("--backend", flags.backend, "LP backend")
      ->check(CLI::IsMember({"bundled", "external"}));
  app.add_option("--seed", flags.seed, "seed for synthetic data and randomized checks");

  std::string date, variant = "nominal", mode = "planning";
  bool no_regulation = false;
  int days = 30, enum_k = 12;
  std::vector<std::string> axis_specs;

  auto* solve_day_cmd = app.add_subcommand("solve-day", "solve one planning day");
  solve_day_cmd->add_option("--date", date, "dataset day to solve (YYYY-MM-DD)");
  solve_day_cmd->add_flag("--no-regulation", no_regulation, "fix all reserve bids to zero");
  solve_day_cmd->add_option("--variant", variant, "scenario variant");

  auto* backtest_cmd = app.add_subcommand("backtest", "rolling-horizon backtest");
  backtest_cmd->add_option("--variant", variant, "scenario variant");
  backtest_cmd->add_option("--days", days, "number of ledgered days");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "grid search over (p*, y*)");
  calibrate_cmd->add_option("--variant", variant, "scenario variant");
  calibrate_cmd->add_option("--days", days, "training days");

  auto* verify_cmd = app.add_subcommand("verify", "run the property suite");
  verify_cmd->add_option("--enum-k", enum_k, "largest horizon enumerated exhaustively");

  auto* sweep_cmd = app.add_subcommand("sweep", "sensitivity sweeps");
  sweep_cmd->add_option("--axis", axis_specs, "axis as name=v1,v2,... (repeatable)");
  sweep_cmd->add_option("--mode", mode, "planning or backtest");
  sweep_cmd->add_option("--days", days, "days per grid point");

  auto* export_cmd = app.add_subcommand("export-lp", "write the day model as MPS");
  export_cmd->add_option("--date", date, "dataset day (YYYY-MM-DD)");
  export_cmd->add_flag("--no-regulation", no_regulation, "fix all reserve bids to zero");
  export_cmd->add_option("--variant", variant, "scenario variant");

  CLI11_PARSE(app, argc, argv);

  try {
    const AppConfig cfg = load_config(flags.config_path);
    fs::create_directories(flags.out_dir);
    if (solve_day_cmd->parsed()) return cmd_solve_day(flags, cfg, date, no_regulation, variant);
    if (backtest_cmd->parsed()) return cmd_backtest(flags, cfg, variant, days);
    if (calibrate_cmd->parsed()) return cmd_calibrate(flags, cfg, variant, days);
    if (verify_cmd->parsed()) return cmd_verify(flags, cfg, enum_k);
    if (sweep_cmd->parsed()) return cmd_sweep(flags, cfg, axis_specs, mode, days);
    if (export_cmd->parsed()) return cmd_export_lp(flags, cfg, date, no_regulation, variant);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
