#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "v2g/instance.hpp"

namespace v2g {

// ---------------------------------------------------------------------------
// calendar arithmetic (proleptic Gregorian, UTC throughout)

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  auto operator<=>(const CivilDate&) const = default;
};

int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(int64_t days);
int weekday_from_days(int64_t days);  // 0 = Monday .. 6 = Sunday

CivilDate parse_date(const std::string& s);                // YYYY-MM-DD
int64_t parse_timestamp(const std::string& s);             // ISO 8601, UTC
std::string format_date(const CivilDate& d);

// ---------------------------------------------------------------------------
// frequency traces

struct GapReport {
  int gaps = 0;              // runs of missing samples
  int64_t max_gap_s = 0;
  long filled = 0;           // forward-filled samples
  long total = 0;
};

struct FrequencyTrace {
  int64_t start = 0;  // unix seconds of the first sample
  int step_s = 10;
  Vec delta;
  GapReport gaps;
};

// CSV with header timestamp,hz or timestamp,delta. Timestamps must be
// strictly increasing; gaps up to 60 s are forward-filled, longer gaps are
// reported so callers can drop the affected days.
FrequencyTrace load_frequency_csv(const std::string& path, const GridConfig& grid);

/// Per-interval means of a sample vector: the adjoint of piecewise lifting.
Vec interval_average_delta(const Vec& samples, int steps_per_interval);

// ---------------------------------------------------------------------------
// tariff calendar

enum class DayType { High, Medium, Low };

struct TariffCalendar {
  // EUR/kWh by day type, peak hours 06:00-22:00 local on work days
  double peak[3] = {0.60, 0.18, 0.16};     // indexed by DayType
  double offpeak[3] = {0.40, 0.14, 0.12};
  int peak_start_hour = 6;
  int peak_end_hour = 22;
  int utc_offset_hours = 1;  // tariff windows are defined in local time
  std::map<int64_t, DayType> day_types;  // by day number
  std::set<int64_t> holidays;            // treated as non-work days

  DayType day_type(const CivilDate& date) const;
  bool work_day(const CivilDate& date) const;
  void validate() const;  // high: Nov-Mar work days; medium: never Sunday
};

/// Availability prices per day, one entry per trading interval (EUR/kW/h).
using AvailabilitySeries = std::map<int64_t, Vec>;

// Utility prices from the calendar plus availability prices; the expected
// regulation price is identified with the availability price.
PriceProfile build_day_prices(const TariffCalendar& calendar, const AvailabilitySeries& availability,
                              const CivilDate& date, const HorizonSpec& horizon);

// ---------------------------------------------------------------------------
// driving schedule

struct DrivingWindow {
  std::vector<int> weekdays;  // 0 = Monday .. 6 = Sunday
  double start_hour = 7.0;    // local, must align to the trading grid
  double end_hour = 9.0;
  double energy_kwh = 3.5;
};

struct DrivingSchedule {
  std::vector<DrivingWindow> windows;
  std::set<int64_t> holidays;  // no driving on these days
  double yearly_mileage_km = 10000.0;
  double efficiency_kwh_per_km = 0.2;

  // constant power over each window, zero on holidays
  Vec day_driving_power(const CivilDate& date, const HorizonSpec& horizon) const;
  double yearly_energy(int year) const;  // sum over one calendar year (kWh)
  void validate(const HorizonSpec& horizon) const;

  // commuter default: work-day morning and evening windows plus a Saturday
  // errand, scaled so the yearly energy matches mileage * efficiency
  static DrivingSchedule commuter_default();
};

// ---------------------------------------------------------------------------
// nominal parameters and datasets

struct NominalDefaults {
  BatteryParams battery{10.0, 40.0, 0.85, 0.85};
  GridConfig grid{50.0, 0.2};
  double charger_kw = 7.0;
  double dt = 0.5;
  double horizon_h = 24.0;
  double gamma = 0.5, Gamma = 2.5;      // hard window (h)
  double gamma_hat = 0.5, Gamma_hat = 24.0;  // soft window (h)
  TerminalTarget target{27.0, 0.15};

  HorizonSpec horizon() const { return HorizonSpec::from_intervals(
      static_cast<int>(std::llround(horizon_h / dt)), dt); }
  UncertaintyWindowSpec hard_window() const {
    return UncertaintyWindowSpec(gamma, Gamma, dt, horizon().K);
  }
  UncertaintyWindowSpec soft_window() const {
    return UncertaintyWindowSpec(gamma_hat, Gamma_hat, dt, horizon().K);
  }
};

struct DayData {
  CivilDate date;
  Vec delta_trace;               // 10-s deviation samples, length K * steps_per_interval
  PriceProfile prices;
  Vec driving;                   // kW per interval
  Vec ybar_plus, ybar_minus;     // kW per interval
  std::optional<Vec> delivery_price_trace;  // EUR/kWh at trace resolution
};

struct Dataset {
  HorizonSpec horizon;
  int step_s = 10;
  std::vector<DayData> days;

  int steps_per_interval() const {
    return static_cast<int>(std::llround(horizon.dt * 3600.0 / step_s));
  }
};

struct SynthSpec {
  NominalDefaults params;
  bool two_level_prices = true;      // otherwise flat
  double p_b_offpeak = 0.12, p_b_peak = 0.18;  // EUR/kWh
  double p_a = 0.0165;               // EUR/kW/h
  double amplitude = 0.7;            // scale of the deviation process
  bool constrain_to_soft = true;     // keep interval averages inside the soft set
  bool jitter = false;               // sign-preserving within-interval wiggle
  bool with_driving = true;
};

// Deterministic synthetic dataset: bounded zero-mean deviation traces,
// two-level or flat prices, commuter driving. Identical seeds give
// byte-identical datasets.
Dataset synth_dataset(uint64_t seed, int days, const SynthSpec& spec);

// One random interval scenario inside the given budget set, built by capping
// each draw at the remaining budget of its trailing window.
Vec random_scenario_in(const UncertaintyWindowSpec& spec, std::mt19937_64& rng,
                       double amplitude = 1.0);

// Assembles a dataset from the CSV files in `dir`: frequency.csv,
// availability.csv, daytypes.csv and optionally delivery.csv.
Dataset load_dataset(const std::string& dir, const NominalDefaults& params,
                     const TariffCalendar& calendar, const DrivingSchedule& schedule);

}  // namespace v2g
