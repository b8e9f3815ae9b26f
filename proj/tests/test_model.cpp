#include <doctest.h>

#include <random>

#include "v2g/model.hpp"

using namespace v2g;

namespace {

BatteryParams battery(double eta) { return {10.0, 40.0, eta, eta}; }

MarketDecision dec(std::initializer_list<double> xb, std::initializer_list<double> xr) {
  MarketDecision d;
  d.x_b = Eigen::Map<const Vec>(std::data(xb), static_cast<Eigen::Index>(xb.size()));
  d.x_r = Eigen::Map<const Vec>(std::data(xr), static_cast<Eigen::Index>(xr.size()));
  return d;
}

}  // namespace

TEST_CASE("delta_from_frequency clips and normalizes") {
  GridConfig g{50.0, 0.2};
  CHECK(delta_from_frequency(50.25, g) == doctest::Approx(1.0));
  CHECK(delta_from_frequency(50.0, g) == doctest::Approx(0.0));
  CHECK(delta_from_frequency(49.9, g) == doctest::Approx(-0.5));
  CHECK(delta_from_frequency(49.0, g) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(delta_from_frequency(std::nan(""), g), std::invalid_argument);
  CHECK_THROWS_AS(delta_from_frequency(std::numeric_limits<double>::infinity(), g),
                  std::invalid_argument);
}

TEST_CASE("net_flow_split separates charge and discharge") {
  auto [c1, d1] = net_flow_split(2, 1, -1);
  CHECK(c1 == doctest::Approx(1.0));
  CHECK(d1 == doctest::Approx(0.0));
  auto [c2, d2] = net_flow_split(0, 1, -1);
  CHECK(c2 == doctest::Approx(0.0));
  CHECK(d2 == doctest::Approx(1.0));
  auto [c3, d3] = net_flow_split(1, 1, 0);
  CHECK(c3 == doctest::Approx(1.0));
  CHECK(d3 == doctest::Approx(0.0));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0), ud(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double xb = u(rng), xr = u(rng), delta = ud(rng);
    auto [c, d] = net_flow_split(xb, xr, delta);
    CHECK(c * d == doctest::Approx(0.0));
    CHECK(c - d == doctest::Approx(xb + delta * xr));
  }
}

TEST_CASE("soc_trajectory matches the closed-form examples") {
  {
    const Vec y = soc_trajectory(dec({1}, {0}), Vec::Zero(1), 10.0, battery(1.0), Vec::Zero(1), 0.5);
    CHECK(y[0] == doctest::Approx(10.0));
    CHECK(y[1] == doctest::Approx(10.5));
  }
  {
    Vec delta(1);
    delta << -1.0;
    const Vec y = soc_trajectory(dec({2}, {1}), delta, 10.0, battery(0.85), Vec::Zero(1), 0.5);
    CHECK(y[1] == doctest::Approx(10.425));
  }
  {
    Vec delta(1);
    delta << -1.0;
    const Vec y = soc_trajectory(dec({0}, {1}), delta, 10.0, battery(0.85), Vec::Zero(1), 0.5);
    CHECK(y[1] == doctest::Approx(10.0 - 0.5 / 0.85));
  }
}

TEST_CASE("min-form equals the two-branch charging expression") {
  const BatteryParams b = battery(0.85);
  for (double n = -5.0; n <= 5.0; n += 0.01) {
    const double min_form = std::min(b.eta_plus * n, n / b.eta_minus);
    const double split_form = b.eta_plus * std::max(n, 0.0) - std::max(-n, 0.0) / b.eta_minus;
    CHECK(min_form == doctest::Approx(split_form).epsilon(1e-12));
  }
}

TEST_CASE("soc_trajectory concavity and monotonicity") {
  const int K = 6;
  const BatteryParams b = battery(0.85);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 5.0), ud(-1.0, 1.0), ua(0.0, 1.0);

  auto rand_dec = [&] {
    MarketDecision d;
    d.x_b = Vec::NullaryExpr(K, [&](Eigen::Index) { return u(rng); });
    d.x_r = Vec::NullaryExpr(K, [&](Eigen::Index) { return u(rng); });
    return d;
  };
  auto rand_delta = [&] { return Vec::NullaryExpr(K, [&](Eigen::Index) { return ud(rng); }).eval(); };
  const Vec d_drive = Vec::Zero(K);

  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = ua(rng);
    const MarketDecision a = rand_dec(), c = rand_dec();
    const Vec delta = rand_delta();
    const double y0 = 20.0;

    // concave nondecreasing in x_b
    MarketDecision mix{alpha * a.x_b + (1 - alpha) * c.x_b, a.x_r};
    MarketDecision other{c.x_b, a.x_r};
    Vec ya = soc_trajectory(a, delta, y0, b, d_drive, 0.5);
    Vec yc = soc_trajectory(other, delta, y0, b, d_drive, 0.5);
    Vec ym = soc_trajectory(mix, delta, y0, b, d_drive, 0.5);
    for (int k = 0; k <= K; ++k)
      CHECK(ym[k] >= alpha * ya[k] + (1 - alpha) * yc[k] - 1e-9);
    MarketDecision bigger{a.x_b.array() + 0.7, a.x_r};
    Vec yb = soc_trajectory(bigger, delta, y0, b, d_drive, 0.5);
    for (int k = 0; k <= K; ++k) CHECK(yb[k] >= ya[k] - 1e-12);

    // concave in x_r
    mix = {a.x_b, alpha * a.x_r + (1 - alpha) * c.x_r};
    other = {a.x_b, c.x_r};
    yc = soc_trajectory(other, delta, y0, b, d_drive, 0.5);
    ym = soc_trajectory(mix, delta, y0, b, d_drive, 0.5);
    for (int k = 0; k <= K; ++k)
      CHECK(ym[k] >= alpha * ya[k] + (1 - alpha) * yc[k] - 1e-9);

    // concave nondecreasing in delta
    const Vec delta2 = rand_delta();
    const Vec dmix = alpha * delta + (1 - alpha) * delta2;
    ya = soc_trajectory(a, delta, y0, b, d_drive, 0.5);
    yc = soc_trajectory(a, delta2, y0, b, d_drive, 0.5);
    ym = soc_trajectory(a, dmix, y0, b, d_drive, 0.5);
    for (int k = 0; k <= K; ++k)
      CHECK(ym[k] >= alpha * ya[k] + (1 - alpha) * yc[k] - 1e-9);
    const Vec dup = delta.cwiseMax(delta2);
    const Vec yd = soc_trajectory(a, dup, y0, b, d_drive, 0.5);
    for (int k = 0; k <= K; ++k) CHECK(yd[k] >= ya[k] - 1e-12);

    // affine nondecreasing in y0
    const Vec y_lo = soc_trajectory(a, delta, 15.0, b, d_drive, 0.5);
    const Vec y_hi = soc_trajectory(a, delta, 25.0, b, d_drive, 0.5);
    const Vec y_mid = soc_trajectory(a, delta, 0.5 * (15.0 + 25.0), b, d_drive, 0.5);
    for (int k = 0; k <= K; ++k) {
      CHECK(y_mid[k] == doctest::Approx(0.5 * (y_lo[k] + y_hi[k])));
      CHECK(y_hi[k] >= y_lo[k]);
    }
  }
}

TEST_CASE("expected_cost matches hand values and is linear") {
  HorizonSpec h = HorizonSpec::from_intervals(48, 0.5);
  PriceProfile p;
  p.p_b = Vec::Constant(48, 0.14);
  p.p_r = Vec::Constant(48, 0.008);
  p.p_a = Vec::Constant(48, 0.008);

  MarketDecision buy{Vec::Ones(48), Vec::Zero(48)};
  CHECK(expected_cost(buy, p, h) == doctest::Approx(3.36));
  MarketDecision reserve{Vec::Zero(48), Vec::Ones(48)};
  CHECK(expected_cost(reserve, p, h) == doctest::Approx(-0.192));
  CHECK(expected_cost(MarketDecision::zero(48), p, h) == doctest::Approx(0.0));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int i = 0; i < 50; ++i) {
    MarketDecision a{Vec::NullaryExpr(48, [&](Eigen::Index) { return u(rng); }),
                     Vec::NullaryExpr(48, [&](Eigen::Index) { return u(rng); })};
    MarketDecision c{Vec::NullaryExpr(48, [&](Eigen::Index) { return u(rng); }),
                     Vec::NullaryExpr(48, [&](Eigen::Index) { return u(rng); })};
    const double al = u(rng) / 4.0, be = u(rng) / 4.0;
    MarketDecision mix{al * a.x_b + be * c.x_b, al * a.x_r + be * c.x_r};
    CHECK(expected_cost(mix, p, h) ==
          doctest::Approx(al * expected_cost(a, p, h) + be * expected_cost(c, p, h)));
  }
}

TEST_CASE("PeriodProfile disconnects driving intervals") {
  Vec d(3), yp(3), ym(3);
  d << 0.0, 6.0, 0.0;
  yp << 7.0, 7.0, 7.0;
  ym << 7.0, 7.0, 7.0;
  PeriodProfile prof(d, yp, ym);
  CHECK(prof.ybar_plus[1] == 0.0);
  CHECK(prof.ybar_minus[1] == 0.0);
  CHECK(prof.ybar_plus[0] == 7.0);
}
