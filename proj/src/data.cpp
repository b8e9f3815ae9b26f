#include "v2g/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace v2g {

// ---------------------------------------------------------------------------
// calendar arithmetic

int64_t days_from_civil(const CivilDate& d) {
  int y = d.year;
  const unsigned m = static_cast<unsigned>(d.month);
  const unsigned day = static_cast<unsigned>(d.day);
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<int64_t>(era) * 146097 + static_cast<int64_t>(doe) - 719468;
}

CivilDate civil_from_days(int64_t z) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned day = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(day)};
}

int weekday_from_days(int64_t days) {
  // day 0 (1970-01-01) was a Thursday
  return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

CivilDate parse_date(const std::string& s) {
  CivilDate d;
  char dash1 = 0, dash2 = 0;
  std::istringstream is(s);
  if (!(is >> d.year >> dash1 >> d.month >> dash2 >> d.day) || dash1 != '-' || dash2 != '-' ||
      d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
    throw std::invalid_argument("parse_date: expected YYYY-MM-DD, got '" + s + "'");
  return d;
}

int64_t parse_timestamp(const std::string& s) {
  if (s.size() < 19) throw std::invalid_argument("parse_timestamp: '" + s + "'");
  const CivilDate d = parse_date(s.substr(0, 10));
  const char sep = s[10];
  if (sep != 'T' && sep != ' ')
    throw std::invalid_argument("parse_timestamp: missing date-time separator in '" + s + "'");
  int hh = 0, mm = 0, ss = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(s.substr(11, 8));
  if (!(is >> hh >> c1 >> mm >> c2 >> ss) || c1 != ':' || c2 != ':' || hh > 23 || mm > 59 || ss > 60)
    throw std::invalid_argument("parse_timestamp: bad time in '" + s + "'");
  return days_from_civil(d) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_date(const CivilDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

// ---------------------------------------------------------------------------
// frequency traces

FrequencyTrace load_frequency_csv(const std::string& path, const GridConfig& grid) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_frequency_csv: cannot open " + path);

  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error("load_frequency_csv: empty file " + path);
  bool is_hz;
  if (line == "timestamp,hz")
    is_hz = true;
  else if (line == "timestamp,delta")
    is_hz = false;
  else
    throw std::runtime_error("load_frequency_csv: unknown header '" + line + "' in " + path);

  std::vector<int64_t> ts;
  std::vector<double> raw;
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("load_frequency_csv: line " + std::to_string(line_no) +
                               ": missing comma");
    int64_t t;
    double v;
    try {
      t = parse_timestamp(line.substr(0, comma));
      v = std::stod(line.substr(comma + 1));
    } catch (const std::exception& e) {
      throw std::runtime_error("load_frequency_csv: line " + std::to_string(line_no) + ": " +
                               e.what());
    }
    if (!std::isfinite(v))
      throw std::runtime_error("load_frequency_csv: line " + std::to_string(line_no) +
                               ": non-finite value");
    if (!ts.empty() && t <= ts.back())
      throw std::runtime_error("load_frequency_csv: line " + std::to_string(line_no) +
                               ": timestamps must be strictly increasing");
    ts.push_back(t);
    raw.push_back(is_hz ? delta_from_frequency(v, grid) : std::clamp(v, -1.0, 1.0));
  }
  if (ts.empty()) throw std::runtime_error("load_frequency_csv: no samples in " + path);

  FrequencyTrace trace;
  trace.start = ts.front();
  trace.step_s = 10;
  if (ts.size() > 1) {  // nominal spacing: smallest observed gap
    int64_t step = ts[1] - ts[0];
    for (size_t i = 2; i < ts.size(); ++i) step = std::min(step, ts[i] - ts[i - 1]);
    trace.step_s = static_cast<int>(step);
  }

  const long n = static_cast<long>((ts.back() - ts.front()) / trace.step_s) + 1;
  trace.delta = Vec::Constant(n, std::numeric_limits<double>::quiet_NaN());
  trace.gaps.total = n;
  long cursor = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    const long pos = static_cast<long>((ts[i] - trace.start) / trace.step_s);
    if (pos * trace.step_s != ts[i] - trace.start)
      throw std::runtime_error("load_frequency_csv: timestamp off the sampling grid near line " +
                               std::to_string(i + 2));
    if (pos > cursor) {  // gap
      const int64_t gap_s = (pos - cursor) * trace.step_s;
      ++trace.gaps.gaps;
      trace.gaps.max_gap_s = std::max(trace.gaps.max_gap_s, gap_s);
      if (gap_s <= 60) {
        for (long p = cursor; p < pos; ++p) trace.delta[p] = trace.delta[cursor - 1];
        trace.gaps.filled += pos - cursor;
      }
    }
    trace.delta[pos] = raw[i];
    cursor = pos + 1;
  }
  return trace;
}

Vec interval_average_delta(const Vec& samples, int steps_per_interval) {
  if (steps_per_interval < 1 || samples.size() % steps_per_interval != 0)
    throw std::invalid_argument("interval_average_delta: samples must tile the intervals");
  const Eigen::Index K = samples.size() / steps_per_interval;
  Vec out(K);
  for (Eigen::Index k = 0; k < K; ++k)
    out[k] = samples.segment(k * steps_per_interval, steps_per_interval).mean();
  return out;
}

// ---------------------------------------------------------------------------
// tariff calendar

DayType TariffCalendar::day_type(const CivilDate& date) const {
  const auto it = day_types.find(days_from_civil(date));
  return it == day_types.end() ? DayType::Low : it->second;
}

bool TariffCalendar::work_day(const CivilDate& date) const {
  const int64_t dn = days_from_civil(date);
  return weekday_from_days(dn) < 5 && holidays.count(dn) == 0;
}

void TariffCalendar::validate() const {
  for (int i = 0; i < 3; ++i)
    if (!(peak[i] > 0.0) || !(offpeak[i] > 0.0))
      throw std::invalid_argument("TariffCalendar: price levels must be positive");
  for (const auto& [dn, type] : day_types) {
    const CivilDate d = civil_from_days(dn);
    if (type == DayType::High) {
      const bool winter = d.month >= 11 || d.month <= 3;
      if (!winter || !work_day(d))
        throw std::invalid_argument("TariffCalendar: high day " + format_date(d) +
                                    " must be a Nov-Mar work day");
    }
    if (type == DayType::Medium && weekday_from_days(dn) == 6)
      throw std::invalid_argument("TariffCalendar: medium day " + format_date(d) +
                                  " falls on a Sunday");
  }
}

PriceProfile build_day_prices(const TariffCalendar& calendar, const AvailabilitySeries& availability,
                              const CivilDate& date, const HorizonSpec& horizon) {
  calendar.validate();
  const int64_t dn = days_from_civil(date);
  const auto it = availability.find(dn);
  if (it == availability.end())
    throw std::runtime_error("build_day_prices: no availability prices for " + format_date(date));
  if (it->second.size() != horizon.K)
    throw std::runtime_error("build_day_prices: availability series has wrong length on " +
                             format_date(date));

  const int level = static_cast<int>(calendar.day_type(date));
  const bool work = calendar.work_day(date);
  PriceProfile p;
  p.p_b.resize(horizon.K);
  for (int k = 0; k < horizon.K; ++k) {
    const double local_hour =
        std::fmod(k * horizon.dt + calendar.utc_offset_hours + 24.0, 24.0);
    const bool peak_hour =
        work && local_hour >= calendar.peak_start_hour && local_hour < calendar.peak_end_hour;
    p.p_b[k] = peak_hour ? calendar.peak[level] : calendar.offpeak[level];
  }
  p.p_a = it->second;
  p.p_r = p.p_a;  // expected regulation price; E[delta * p_d] taken as zero
  return p;
}

// ---------------------------------------------------------------------------
// driving schedule

Vec DrivingSchedule::day_driving_power(const CivilDate& date, const HorizonSpec& horizon) const {
  Vec d = Vec::Zero(horizon.K);
  const int64_t dn = days_from_civil(date);
  if (holidays.count(dn)) return d;
  const int wd = weekday_from_days(dn);
  for (const auto& window : windows) {
    if (std::find(window.weekdays.begin(), window.weekdays.end(), wd) == window.weekdays.end())
      continue;
    const double hours = window.end_hour - window.start_hour;
    const double power = window.energy_kwh / hours;
    const int k0 = static_cast<int>(std::llround(window.start_hour / horizon.dt));
    const int k1 = static_cast<int>(std::llround(window.end_hour / horizon.dt));
    for (int k = k0; k < k1 && k < horizon.K; ++k) d[k] += power;
  }
  return d;
}

double DrivingSchedule::yearly_energy(int year) const {
  double total = 0.0;
  const int64_t first = days_from_civil({year, 1, 1});
  const int64_t last = days_from_civil({year + 1, 1, 1});
  for (int64_t dn = first; dn < last; ++dn) {
    if (holidays.count(dn)) continue;
    const int wd = weekday_from_days(dn);
    for (const auto& window : windows)
      if (std::find(window.weekdays.begin(), window.weekdays.end(), wd) != window.weekdays.end())
        total += window.energy_kwh;
  }
  return total;
}

void DrivingSchedule::validate(const HorizonSpec& horizon) const {
  for (const auto& w : windows) {
    if (!(w.end_hour > w.start_hour) || w.energy_kwh < 0.0)
      throw std::invalid_argument("DrivingSchedule: malformed window");
    const double a = w.start_hour / horizon.dt, b = w.end_hour / horizon.dt;
    if (std::abs(a - std::llround(a)) > 1e-9 || std::abs(b - std::llround(b)) > 1e-9)
      throw std::invalid_argument("DrivingSchedule: window must align to the trading grid");
  }
}

DrivingSchedule DrivingSchedule::commuter_default() {
  DrivingSchedule s;
  const std::vector<int> workdays = {0, 1, 2, 3, 4};
  s.windows = {
      {workdays, 7.0, 9.0, 1.0},
      {workdays, 17.0, 19.0, 1.0},
      {{5}, 10.0, 12.0, 1.0},
  };
  // scale window energies so a reference year matches mileage * efficiency
  const double target = s.yearly_mileage_km * s.efficiency_kwh_per_km;
  const double unit = s.yearly_energy(2019);
  for (auto& w : s.windows) w.energy_kwh = target / unit;
  return s;
}

// ---------------------------------------------------------------------------
// synthetic data

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Vec random_scenario_in(const UncertaintyWindowSpec& spec, std::mt19937_64& rng, double amplitude) {
  Vec s = Vec::Zero(spec.K);
  for (int k = 0; k < spec.K; ++k) {
    double used = 0.0;
    for (int l = std::max(0, k - spec.w + 1); l < k; ++l) used += std::abs(s[l]);
    const double cap = std::min(1.0, spec.b - used);
    if (cap <= 0.0) continue;
    s[k] = amplitude * cap * (2.0 * uniform01(rng) - 1.0);
  }
  return s;
}

Dataset synth_dataset(uint64_t seed, int days, const SynthSpec& spec) {
  if (days < 1) throw std::invalid_argument("synth_dataset: need at least one day");
  std::mt19937_64 rng(seed);
  const HorizonSpec horizon = spec.params.horizon();
  const UncertaintyWindowSpec window =
      spec.constrain_to_soft ? spec.params.soft_window() : spec.params.hard_window();

  Dataset ds;
  ds.horizon = horizon;
  ds.step_s = 10;
  const int spi = ds.steps_per_interval();
  const DrivingSchedule schedule = DrivingSchedule::commuter_default();
  const CivilDate start{2021, 1, 4};  // a Monday
  const int64_t start_dn = days_from_civil(start);

  for (int i = 0; i < days; ++i) {
    DayData day;
    day.date = civil_from_days(start_dn + i);

    const Vec scenario = random_scenario_in(window, rng, spec.amplitude);
    day.delta_trace.resize(horizon.K * spi);
    for (int k = 0; k < horizon.K; ++k) {
      if (!spec.jitter || scenario[k] == 0.0) {
        day.delta_trace.segment(k * spi, spi).setConstant(scenario[k]);
        continue;
      }
      // sign-preserving wiggle with exact mean 1 over the interval
      const double amp = std::min(0.5, 1.0 / std::abs(scenario[k]) - 1.0);
      for (int s = 0; s < spi; ++s)
        day.delta_trace[k * spi + s] =
            scenario[k] * (1.0 + amp * std::sin(2.0 * M_PI * (s + 0.5) / spi));
    }

    day.prices.p_b.resize(horizon.K);
    for (int k = 0; k < horizon.K; ++k) {
      const double hour = k * horizon.dt;
      const bool peak = spec.two_level_prices && hour >= 6.0 && hour < 22.0;
      day.prices.p_b[k] = peak ? spec.p_b_peak : spec.p_b_offpeak;
    }
    day.prices.p_a = Vec::Constant(horizon.K, spec.p_a);
    day.prices.p_r = day.prices.p_a;

    day.driving = spec.with_driving ? schedule.day_driving_power(day.date, horizon)
                                    : Vec::Zero(horizon.K);
    day.ybar_plus = Vec::Constant(horizon.K, spec.params.charger_kw);
    day.ybar_minus = Vec::Constant(horizon.K, spec.params.charger_kw);
    for (int k = 0; k < horizon.K; ++k)
      if (day.driving[k] > 0.0) {
        day.ybar_plus[k] = 0.0;
        day.ybar_minus[k] = 0.0;
      }
    ds.days.push_back(std::move(day));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// CSV dataset assembly

namespace {

std::vector<std::pair<std::string, std::string>> read_two_column_csv(const std::string& path,
                                                                     const std::string& header) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != header)
    throw std::runtime_error(path + ": expected header '" + header + "'");
  std::vector<std::pair<std::string, std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path + ": malformed row '" + line + "'");
    rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  return rows;
}

}  // namespace

Dataset load_dataset(const std::string& dir, const NominalDefaults& params,
                     const TariffCalendar& calendar, const DrivingSchedule& schedule) {
  const HorizonSpec horizon = params.horizon();
  schedule.validate(horizon);
  const FrequencyTrace trace = load_frequency_csv(dir + "/frequency.csv", params.grid);

  AvailabilitySeries availability;
  {
    std::ifstream f(dir + "/availability.csv");
    if (!f) throw std::runtime_error("cannot open " + dir + "/availability.csv");
    std::string line;
    if (!std::getline(f, line) || line != "date,interval,price_eur_per_kw_h")
      throw std::runtime_error("availability.csv: unexpected header '" + line + "'");
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      std::istringstream is(line);
      std::string date_s, interval_s, price_s;
      if (!std::getline(is, date_s, ',') || !std::getline(is, interval_s, ',') ||
          !std::getline(is, price_s))
        throw std::runtime_error("availability.csv: malformed row '" + line + "'");
      const int64_t dn = days_from_civil(parse_date(date_s));
      const int k = std::stoi(interval_s) - 1;
      if (k < 0 || k >= horizon.K)
        throw std::runtime_error("availability.csv: interval out of range in '" + line + "'");
      auto [it, inserted] = availability.try_emplace(dn, Vec::Zero(horizon.K));
      it->second[k] = std::stod(price_s);
    }
  }

  TariffCalendar cal = calendar;
  for (const auto& [date_s, type_s] : read_two_column_csv(dir + "/daytypes.csv", "date,type")) {
    DayType t;
    if (type_s == "high")
      t = DayType::High;
    else if (type_s == "medium")
      t = DayType::Medium;
    else if (type_s == "low")
      t = DayType::Low;
    else
      throw std::runtime_error("daytypes.csv: unknown type '" + type_s + "'");
    cal.day_types[days_from_civil(parse_date(date_s))] = t;
  }
  cal.validate();

  // optional delivery prices, forward-filled onto the trace grid
  std::map<int64_t, double> delivery;
  {
    std::ifstream probe(dir + "/delivery.csv");
    if (probe) {
      for (const auto& [ts_s, price_s] :
           read_two_column_csv(dir + "/delivery.csv", "timestamp,price_eur_per_kwh"))
        delivery[parse_timestamp(ts_s)] = std::stod(price_s);
    }
  }

  Dataset ds;
  ds.horizon = horizon;
  ds.step_s = trace.step_s;
  const int spi = ds.steps_per_interval();
  const long steps_per_day = static_cast<long>(horizon.K) * spi;

  const int64_t first_day = (trace.start + 86399) / 86400;
  const int64_t last_day = (trace.start + trace.step_s * (trace.delta.size() - 1)) / 86400;
  for (int64_t dn = first_day; dn <= last_day; ++dn) {
    const int64_t day_start_s = dn * 86400;
    const long offset = (day_start_s - trace.start) / trace.step_s;
    if (offset < 0 || offset + steps_per_day > trace.delta.size()) continue;
    const Vec slice = trace.delta.segment(offset, steps_per_day);
    const long missing = (slice.array().isNaN()).count();
    if (missing > steps_per_day / 100) continue;  // incomplete day
    if (availability.find(dn) == availability.end()) continue;

    DayData day;
    day.date = civil_from_days(dn);
    day.delta_trace = slice.array().isNaN().select(0.0, slice);
    day.prices = build_day_prices(cal, availability, day.date, horizon);
    day.driving = schedule.day_driving_power(day.date, horizon);
    day.ybar_plus = Vec::Constant(horizon.K, params.charger_kw);
    day.ybar_minus = Vec::Constant(horizon.K, params.charger_kw);
    for (int k = 0; k < horizon.K; ++k)
      if (day.driving[k] > 0.0) {
        day.ybar_plus[k] = 0.0;
        day.ybar_minus[k] = 0.0;
      }
    if (!delivery.empty()) {
      Vec pd(steps_per_day);
      double last_price = delivery.begin()->second;
      for (long s = 0; s < steps_per_day; ++s) {
        const auto it = delivery.upper_bound(day_start_s + s * ds.step_s);
        if (it != delivery.begin()) last_price = std::prev(it)->second;
        pd[s] = last_price;
      }
      day.delivery_price_trace = pd;
    }
    ds.days.push_back(std::move(day));
  }
  if (ds.days.empty()) throw std::runtime_error("load_dataset: no complete days in " + dir);
  return ds;
}

}  // namespace v2g
