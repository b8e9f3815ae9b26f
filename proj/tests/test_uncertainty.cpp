#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "v2g/instance.hpp"
#include "v2g/uncertainty.hpp"

using namespace v2g;

namespace {

// spec with integer dt = 1h so that (w, b) are chosen directly
UncertaintyWindowSpec grid_spec(int K, int w, int b) {
  return UncertaintyWindowSpec(static_cast<double>(b), static_cast<double>(w), 1.0, K);
}

Vec vec(std::initializer_list<double> v) {
  return Eigen::Map<const Vec>(std::data(v), static_cast<Eigen::Index>(v.size()));
}

std::set<std::vector<int>> as_set(const std::vector<Vec>& scenarios) {
  std::set<std::vector<int>> out;
  for (const Vec& s : scenarios) {
    std::vector<int> key(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) key[i] = static_cast<int>(std::lround(s[i]));
    out.insert(key);
  }
  return out;
}

ProblemInstance tiny_instance(int K, double eta, double dt, int w, int b) {
  ProblemInstance inst;
  inst.battery = {0.0, 1000.0, eta, eta};
  inst.horizon = HorizonSpec::from_intervals(K, dt);
  inst.profile = PeriodProfile(Vec::Zero(K), Vec::Constant(K, 100.0), Vec::Constant(K, 100.0));
  inst.prices.p_b = Vec::Constant(K, 0.1);
  inst.prices.p_r = Vec::Constant(K, 0.01);
  inst.prices.p_a = Vec::Constant(K, 0.01);
  inst.target = {500.0, 0.0};
  inst.y0_hard = {10.0, 10.0};
  inst.y0_soft = {10.0, 10.0};
  inst.u_hard = UncertaintyWindowSpec(b * dt, w * dt, dt, K);
  inst.u_soft = inst.u_hard;
  return inst;
}

}  // namespace

TEST_CASE("window spec derives integer budgets and rejects fractional ones") {
  UncertaintyWindowSpec nominal(0.5, 2.5, 0.5, 48);
  CHECK(nominal.b == 1);
  CHECK(nominal.w == 5);
  CHECK_THROWS_AS(UncertaintyWindowSpec(0.3, 2.5, 0.5, 48), std::invalid_argument);
  CHECK_THROWS_AS(UncertaintyWindowSpec(0.5, 2.4, 0.5, 48), std::invalid_argument);
  CHECK_THROWS_AS(UncertaintyWindowSpec(2.0, 1.0, 0.5, 48), std::invalid_argument);
  // window longer than the horizon is capped without changing the set
  UncertaintyWindowSpec tail(0.5, 24.0, 0.5, 24);
  CHECK(tail.w == 24);
}

TEST_CASE("contains checks every rolling window") {
  const auto spec = grid_spec(4, 2, 1);
  CHECK(contains(spec, vec({1, 0, 1, 0})));
  CHECK_FALSE(contains(spec, vec({1, 1, 0, 0})));
  CHECK(contains(spec, Vec::Zero(4)));
  CHECK(contains(spec, vec({-1, 0, 1, 0})));        // sign does not matter
  CHECK_FALSE(contains(spec, vec({0.6, 0.6, 0, 0})));
  CHECK_FALSE(contains(spec, vec({1.2, 0, 0, 0})));  // box violation
}

TEST_CASE("enumerate_binary_scenarios lists exactly the feasible binary points") {
  CHECK(as_set(enumerate_binary_scenarios(grid_spec(2, 2, 1))) ==
        std::set<std::vector<int>>{{0, 0}, {1, 0}, {0, 1}});
  CHECK(as_set(enumerate_binary_scenarios(grid_spec(1, 1, 1))) ==
        std::set<std::vector<int>>{{0}, {1}});
  CHECK(as_set(enumerate_binary_scenarios(grid_spec(3, 2, 1))) ==
        std::set<std::vector<int>>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}});
  CHECK_THROWS_AS(enumerate_binary_scenarios(grid_spec(21, 2, 1)), std::invalid_argument);
}

TEST_CASE("worst_case_weighted_sum matches the spec examples") {
  {
    const auto wc = worst_case_weighted_sum(grid_spec(2, 2, 1), vec({1, 2}), 2);
    CHECK(wc.value == doctest::Approx(2.0));
    CHECK(wc.argmax[0] == doctest::Approx(0.0));
    CHECK(wc.argmax[1] == doctest::Approx(1.0));
  }
  {
    const auto wc = worst_case_weighted_sum(grid_spec(3, 2, 1), vec({3, 1, 3}), 3);
    CHECK(wc.value == doctest::Approx(6.0));
    CHECK(wc.argmax[0] == doctest::Approx(1.0));
    CHECK(wc.argmax[1] == doctest::Approx(0.0));
    CHECK(wc.argmax[2] == doctest::Approx(1.0));
  }
  {
    const auto wc = worst_case_weighted_sum(grid_spec(3, 2, 1), Vec::Zero(3), 3);
    CHECK(wc.value == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(worst_case_weighted_sum(grid_spec(3, 2, 1), vec({-1, 0, 0}), 3),
                  std::invalid_argument);
}

TEST_CASE("LP oracle agrees exactly with brute force") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int K : {4, 6, 8}) {
    for (int w : {2, 3, 4}) {
      for (int b : {1, 2}) {
        if (b > w) continue;
        const auto spec = grid_spec(K, w, b);
        for (int trial = 0; trial < 10; ++trial) {
          Vec weights = Vec::NullaryExpr(K, [&](Eigen::Index) { return u(rng); });
          const int k = 1 + static_cast<int>(rng() % K);
          const auto lp = worst_case_weighted_sum(spec, weights, k);
          const auto bf = brute_force_weighted_sum(spec, weights, k);
          CHECK(lp.value == doctest::Approx(bf.value).epsilon(1e-12));
          CHECK(contains(spec, lp.argmax));
        }
      }
    }
  }
}

TEST_CASE("sign symmetry: signed optimum equals the nonnegative optimum") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const auto spec = grid_spec(5, 3, 1);
  Vec weights = Vec::NullaryExpr(5, [&](Eigen::Index) { return u(rng); });

  // brute force over the signed grid {-1,0,1}^K restricted to D_K
  double best_signed = 0.0;
  for (int code = 0; code < 243; ++code) {
    int c = code;
    Vec s(5);
    for (int i = 0; i < 5; ++i) {
      s[i] = (c % 3) - 1;
      c /= 3;
    }
    if (!contains(spec, s)) continue;
    best_signed = std::max(best_signed, weights.dot(s));
  }
  const auto wc = worst_case_weighted_sum(spec, weights, 5);
  CHECK(wc.value == doctest::Approx(best_signed).epsilon(1e-10));
}

TEST_CASE("oracle vertices are binary for random objectives") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = grid_spec(6, 2 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2));
    Vec weights = Vec::NullaryExpr(6, [&](Eigen::Index) { return u(rng) + 1e-3; });
    const auto wc = worst_case_weighted_sum(spec, weights, 6);
    for (int i = 0; i < 6; ++i)
      CHECK(std::abs(wc.argmax[i] - std::round(wc.argmax[i])) <= 1e-9);
  }
}

TEST_CASE("worst-case SoC oracles") {
  // deterministic prefix when no reserve is offered
  auto inst = tiny_instance(3, 1.0, 1.0, 2, 1);
  MarketDecision x{vec({1, 1, 1}), Vec::Zero(3)};
  CHECK(worst_case_max_soc(x, 10.0, inst, inst.u_hard, 3) == doctest::Approx(13.0));
  CHECK(worst_case_max_soc(x, 10.0, inst, inst.u_hard, 0) == doctest::Approx(10.0));

  // derived example: eta=1, dt=1, x_r=(1,2), K=2, w=2, b=1
  auto inst2 = tiny_instance(2, 1.0, 1.0, 2, 1);
  MarketDecision x2{Vec::Zero(2), vec({1, 2})};
  CHECK(worst_case_max_soc(x2, 10.0, inst2, inst2.u_hard, 2) == doctest::Approx(12.0));

  // derived example: m = x_r when lossless; x_r=(3,1,3)
  MarketDecision x3{Vec::Zero(3), vec({3, 1, 3})};
  CHECK(worst_case_min_soc(x3, 10.0, inst, inst.u_hard, 3) == doctest::Approx(4.0));

  // x = 0: min SoC is just the driving drawdown
  auto inst3 = tiny_instance(3, 0.85, 1.0, 2, 1);
  inst3.profile = PeriodProfile(vec({2, 2, 2}), Vec::Zero(3), Vec::Zero(3));
  CHECK(worst_case_min_soc(MarketDecision::zero(3), 10.0, inst3, inst3.u_hard, 3) ==
        doctest::Approx(4.0));

  // delta_eta branch: x_b=0, x_r=1 gives m = 1/eta
  MarketDecision x4{Vec::Zero(3), Vec::Ones(3)};
  const Vec mm = min_soc_weights(x4, BatteryParams{10, 40, 0.85, 0.85});
  CHECK(mm[0] == doctest::Approx(1.0 / 0.85));
}

TEST_CASE("refine_subgrid scales the window exactly") {
  const auto spec = grid_spec(2, 2, 1);
  const auto same = refine_subgrid(spec, {1});
  CHECK(same.K == 2);
  CHECK(same.w == 2);
  CHECK(same.b == 1);
  const auto fine = refine_subgrid(spec, {2});
  CHECK(fine.K == 4);
  CHECK(fine.w == 4);
  CHECK(fine.b == 2);

  // lifted scenarios keep their membership
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto base = grid_spec(6, 3, 1);
  const auto refined = refine_subgrid(base, {3});
  for (int trial = 0; trial < 200; ++trial) {
    Vec s = Vec::NullaryExpr(6, [&](Eigen::Index) { return u(rng); });
    Vec lifted(18);
    for (int i = 0; i < 6; ++i) lifted.segment(3 * i, 3).setConstant(s[i]);
    CHECK(contains(base, s) == contains(refined, lifted));
  }
}

TEST_CASE("discretization invariance of the prefix worst case") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 2 + static_cast<int>(rng() % 5);
    const int w = 2 + static_cast<int>(rng() % 3);
    const auto spec = grid_spec(K, std::min(w, K), 1);
    Vec weights = Vec::NullaryExpr(K, [&](Eigen::Index) { return u(rng); });
    const int k = 1 + static_cast<int>(rng() % K);
    const double base = worst_case_weighted_sum(spec, weights, k).value;
    for (int N : {2, 4, 8}) {
      const auto fine = refine_subgrid(spec, {N});
      Vec wN(K * N);
      for (int i = 0; i < K; ++i) wN.segment(N * i, N).setConstant(weights[i]);
      const double v = worst_case_weighted_sum(fine, wN, k * N).value;
      CHECK(v / N == doctest::Approx(base).epsilon(1e-8));
    }
  }
}

TEST_CASE("worst case grows with the budget and shrinks with the window") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const int K = 8;
  Vec weights = Vec::NullaryExpr(K, [&](Eigen::Index) { return u(rng); });
  double prev = 0.0;
  for (int b = 1; b <= 4; ++b) {
    const double v = worst_case_weighted_sum(grid_spec(K, 4, b), weights, K).value;
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  prev = std::numeric_limits<double>::infinity();
  for (int w = 2; w <= 6; ++w) {
    const double v = worst_case_weighted_sum(grid_spec(K, w, 2), weights, K).value;
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("variance bound") {
  // nominal hard window: ceil(24/2.5) * 0.5 / 24 = 5/24
  UncertaintyWindowSpec hard(0.5, 2.5, 0.5, 48);
  const auto rep_hard = check_variance_bound(hard, {Vec::Zero(48)});
  CHECK(rep_hard.bound == doctest::Approx(5.0 / 24.0));
  CHECK(rep_hard.max_variance == doctest::Approx(0.0));
  CHECK(rep_hard.within_bound);

  // nominal soft window: 1/48
  UncertaintyWindowSpec soft(0.5, 24.0, 0.5, 48);
  const auto rep_soft = check_variance_bound(soft, {Vec::Zero(48)});
  CHECK(rep_soft.bound == doctest::Approx(1.0 / 48.0));

  // full enumeration at K = 12 with the nominal window shape
  UncertaintyWindowSpec small(0.5, 2.5, 0.5, 12);
  const auto rep = check_variance_bound(small);
  CHECK(rep.within_bound);
  CHECK(rep.max_variance <= rep.bound + 1e-12);
  CHECK(rep.relaxed_attained);
  CHECK(rep.relaxed_max == doctest::Approx(3.0 / 12.0));
}
