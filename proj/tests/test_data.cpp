#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "v2g/data.hpp"

using namespace v2g;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("v2g_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static inline int counter = 0;
};

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("civil date arithmetic") {
  CHECK(days_from_civil({1970, 1, 1}) == 0);
  CHECK(days_from_civil({2021, 1, 4}) == 18631);
  const CivilDate d = civil_from_days(18631);
  CHECK(d == CivilDate{2021, 1, 4});
  CHECK(weekday_from_days(18631) == 0);  // a Monday
  CHECK(weekday_from_days(days_from_civil({2019, 1, 6})) == 6);  // a Sunday
  CHECK(parse_date("2019-07-14") == CivilDate{2019, 7, 14});
  CHECK(format_date({2019, 7, 14}) == "2019-07-14");
  CHECK(parse_timestamp("1970-01-02T00:00:00Z") == 86400);
  CHECK(parse_timestamp("1970-01-01 01:00:00") == 3600);
  CHECK_THROWS_AS(parse_date("2019/07/14"), std::invalid_argument);
}

TEST_CASE("frequency CSV ingestion") {
  TempDir dir;
  const GridConfig grid{50.0, 0.2};

  SUBCASE("hz values are normalized") {
    write_file(dir.path / "f.csv",
               "timestamp,hz\n"
               "2019-01-01T00:00:00Z,50.0\n"
               "2019-01-01T00:00:10Z,50.2\n"
               "2019-01-01T00:00:20Z,49.8\n");
    const auto trace = load_frequency_csv((dir.path / "f.csv").string(), grid);
    REQUIRE(trace.delta.size() == 3);
    CHECK(trace.delta[0] == doctest::Approx(0.0));
    CHECK(trace.delta[1] == doctest::Approx(1.0));
    CHECK(trace.delta[2] == doctest::Approx(-1.0));
    CHECK(trace.step_s == 10);
  }

  SUBCASE("duplicate timestamps are rejected") {
    write_file(dir.path / "f.csv",
               "timestamp,hz\n"
               "2019-01-01T00:00:00Z,50.0\n"
               "2019-01-01T00:00:00Z,50.1\n");
    CHECK_THROWS(load_frequency_csv((dir.path / "f.csv").string(), grid));
  }

  SUBCASE("short gaps are forward-filled") {
    write_file(dir.path / "f.csv",
               "timestamp,delta\n"
               "2019-01-01T00:00:00Z,0.1\n"
               "2019-01-01T00:00:10Z,0.5\n"
               "2019-01-01T00:00:20Z,0.5\n"
               "2019-01-01T00:01:00Z,-0.5\n");
    const auto trace = load_frequency_csv((dir.path / "f.csv").string(), grid);
    REQUIRE(trace.delta.size() == 7);
    CHECK(trace.delta[3] == doctest::Approx(0.5));  // filled from the last sample
    CHECK(trace.delta[5] == doctest::Approx(0.5));
    CHECK(trace.delta[6] == doctest::Approx(-0.5));
    CHECK(trace.gaps.filled == 3);
    CHECK(trace.gaps.gaps == 1);
    CHECK(trace.gaps.max_gap_s == 30);
  }
}

TEST_CASE("interval averages and lifting round trip") {
  Vec constant = Vec::Constant(3 * 4, 0.5);
  CHECK(interval_average_delta(constant, 4).isApproxToConstant(0.5));

  Vec alternating(8);
  alternating << 1, -1, 1, -1, 1, -1, 1, -1;
  CHECK(interval_average_delta(alternating, 4).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("tariff calendar rules") {
  TariffCalendar cal;
  cal.day_types[days_from_civil({2019, 1, 7})] = DayType::High;    // Monday in January
  cal.day_types[days_from_civil({2019, 1, 8})] = DayType::Medium;  // Tuesday
  cal.validate();

  SUBCASE("medium on a Sunday is rejected") {
    cal.day_types[days_from_civil({2019, 1, 6})] = DayType::Medium;  // Sunday
    CHECK_THROWS_AS(cal.validate(), std::invalid_argument);
  }
  SUBCASE("high outside November-March is rejected") {
    cal.day_types[days_from_civil({2019, 7, 1})] = DayType::High;  // July Monday
    CHECK_THROWS_AS(cal.validate(), std::invalid_argument);
  }

  SUBCASE("off-peak pricing on a low day") {
    const HorizonSpec horizon = HorizonSpec::from_intervals(48, 0.5);
    AvailabilitySeries avail;
    avail[days_from_civil({2019, 1, 5})] = Vec::Constant(48, 0.01);  // Saturday: low, no peak
    const PriceProfile p = build_day_prices(cal, avail, {2019, 1, 5}, horizon);
    CHECK(p.p_b.minCoeff() == doctest::Approx(cal.offpeak[2]));
    CHECK(p.p_b.maxCoeff() == doctest::Approx(cal.offpeak[2]));
    CHECK(p.p_r == p.p_a);
  }

  SUBCASE("peak pricing on a high work day") {
    const HorizonSpec horizon = HorizonSpec::from_intervals(48, 0.5);
    AvailabilitySeries avail;
    avail[days_from_civil({2019, 1, 7})] = Vec::Constant(48, 0.01);
    const PriceProfile p = build_day_prices(cal, avail, {2019, 1, 7}, horizon);
    CHECK(p.p_b.maxCoeff() == doctest::Approx(cal.peak[0]));
    CHECK(p.p_b.minCoeff() == doctest::Approx(cal.offpeak[0]));
  }
}

TEST_CASE("commuter driving schedule totals") {
  const DrivingSchedule s = DrivingSchedule::commuter_default();
  const double target = s.yearly_mileage_km * s.efficiency_kwh_per_km;
  const double max_window = s.windows[0].energy_kwh;
  CHECK(std::abs(s.yearly_energy(2019) - target) <= max_window + 1e-9);
  // other years stay within a few windows of the target
  CHECK(std::abs(s.yearly_energy(2021) - target) <= 5 * max_window);

  const HorizonSpec horizon = HorizonSpec::from_intervals(48, 0.5);
  s.validate(horizon);
  const Vec monday = s.day_driving_power({2021, 1, 4}, horizon);
  CHECK(monday.sum() * horizon.dt == doctest::Approx(2 * s.windows[0].energy_kwh));
  CHECK(monday[14] > 0.0);  // 07:00-09:00
  CHECK(monday[20] == 0.0);
  const Vec sunday = s.day_driving_power({2021, 1, 10}, horizon);
  CHECK(sunday.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthetic datasets are deterministic and in-set") {
  SynthSpec spec;
  spec.constrain_to_soft = true;
  const Dataset a = synth_dataset(42, 3, spec);
  const Dataset b = synth_dataset(42, 3, spec);
  const Dataset c = synth_dataset(43, 3, spec);
  REQUIRE(a.days.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.days[i].delta_trace == b.days[i].delta_trace);  // byte identical
  }
  CHECK(a.days[0].delta_trace != c.days[0].delta_trace);

  const auto soft = spec.params.soft_window();
  const int spi = a.steps_per_interval();
  for (const auto& day : a.days) {
    CHECK(day.delta_trace.size() == 48 * spi);
    CHECK(contains(soft, interval_average_delta(day.delta_trace, spi)));
    CHECK(day.delta_trace.cwiseAbs().maxCoeff() <= 1.0);
  }

  const Dataset month = synth_dataset(7, 30, spec);
  long samples = 0;
  for (const auto& day : month.days) samples += day.delta_trace.size();
  CHECK(samples == 259200);
}

TEST_CASE("random scenarios respect the budget set") {
  std::mt19937_64 rng(5);
  const UncertaintyWindowSpec hard(0.5, 2.5, 0.5, 48);
  for (int i = 0; i < 100; ++i) CHECK(contains(hard, random_scenario_in(hard, rng)));
}

TEST_CASE("dataset assembly from CSV files") {
  TempDir dir;
  // two full days of 10-s delta samples plus a ragged edge
  {
    std::ofstream f(dir.path / "frequency.csv");
    f << "timestamp,delta\n";
    const int64_t start = days_from_civil({2019, 1, 7}) * 86400;
    for (int64_t t = 0; t < 2 * 8640; ++t) {
      const int64_t ts = start + t * 10;
      const CivilDate d = civil_from_days(ts / 86400);
      const int64_t sec = ts % 86400;
      char buf[40];
      std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(),
                    static_cast<int>(sec / 3600), static_cast<int>(sec / 60 % 60),
                    static_cast<int>(sec % 60));
      f << buf << ',' << ((t % 7 == 0) ? 0.1 : -0.05) << "\n";
    }
  }
  {
    std::ofstream f(dir.path / "availability.csv");
    f << "date,interval,price_eur_per_kw_h\n";
    for (const char* date : {"2019-01-07", "2019-01-08"})
      for (int k = 1; k <= 48; ++k) f << date << ',' << k << ",0.0165\n";
  }
  write_file(dir.path / "daytypes.csv", "date,type\n2019-01-07,medium\n2019-01-08,low\n");

  const NominalDefaults params;
  TariffCalendar cal;
  const DrivingSchedule schedule = DrivingSchedule::commuter_default();
  const Dataset ds = load_dataset(dir.path.string(), params, cal, schedule);
  REQUIRE(ds.days.size() == 2);
  CHECK(ds.days[0].date == CivilDate{2019, 1, 7});
  CHECK(ds.days[0].prices.p_a[0] == doctest::Approx(0.0165));
  CHECK(ds.days[0].driving[14] > 0.0);          // Monday morning commute
  CHECK(ds.days[0].ybar_plus[14] == 0.0);       // disconnected while driving
  CHECK(ds.days[0].delta_trace.size() == 8640);  // one day at 10 s
}
