#include <doctest.h>

#include <random>

#include "test_instances.hpp"
#include "v2g/robust_lp.hpp"

using namespace v2g;

TEST_CASE("window_end_index") {
  CHECK(window_end_index(5, 1, 5) == 5);
  CHECK(window_end_index(3, 1, 5) == 3);
  CHECK(window_end_index(48, 44, 5) == 48);
  CHECK_THROWS_AS(window_end_index(2, 3, 5), std::invalid_argument);
}

TEST_CASE("size formulas") {
  for (int K : {1, 2, 3, 4, 5, 6, 7, 8, 48}) {
    CHECK(paper_variable_count(K) == 4L * K * K + 7 * K + 1);
    CHECK(paper_constraint_count(K) == 5L * K * K + 15 * K + 4);
    // the physical model plus the fixed-at-zero upper triangle and the
    // nonnegativity conditions reproduces the full formulation size
    const long upper_triangle = 4L * K * (K - 1) / 2;
    CHECK(physical_variable_count(K) + upper_triangle == paper_variable_count(K));
    const long nonneg = 2L * K + dual_block_variable_count(K);
    CHECK(physical_constraint_count(K) + nonneg == paper_constraint_count(K));
  }
  CHECK(paper_variable_count(48) == 9553);
  CHECK(paper_constraint_count(48) == 12244);
  CHECK(dual_block_variable_count(48) == 9408);
  CHECK(paper_variable_count(1) == 12);
  CHECK(paper_constraint_count(1) == 24);
}

TEST_CASE("assembled model matches the physical size formulas") {
  std::mt19937 rng(101);
  for (int K : {1, 2, 4, 6, 8}) {
    const ProblemInstance inst = random_instance(rng, K);
    const LPModel lp = assemble_lp(inst);
    CHECK(lp.num_vars() == physical_variable_count(K));
    CHECK(lp.num_rows() == physical_constraint_count(K));
  }
}

TEST_CASE("optimal decisions are robust feasible") {
  std::mt19937 rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    const int K = 3 + static_cast<int>(rng() % 4);
    const ProblemInstance inst = random_instance(rng, K);
    const SolvedDay day = solve_day(inst);
    REQUIRE(day.status == SolveStatus::Optimal);
    const auto rep = verify_robust_feasibility(day.decision, inst);
    CHECK(rep.max_violation <= 1e-6);
  }
}

TEST_CASE("verify_robust_feasibility flags power violations") {
  std::mt19937 rng(107);
  ProblemInstance inst = random_instance(rng, 4);
  inst.profile = PeriodProfile(Vec::Zero(4), Vec::Constant(4, 7.0), Vec::Constant(4, 7.0));
  MarketDecision bad = MarketDecision::zero(4);
  bad.x_r = inst.profile.ybar_plus.array() + 1.0;
  const auto rep = verify_robust_feasibility(bad, inst);
  CHECK(rep.power_violation == doctest::Approx(1.0).epsilon(1e-9));

  const auto ok = verify_robust_feasibility(MarketDecision::zero(4), inst);
  CHECK(ok.power_violation <= 0.0);
}

TEST_CASE("restriction ordering and p_r = 0 equality") {
  std::mt19937 rng(109);
  for (int trial = 0; trial < 6; ++trial) {
    const int K = 3 + static_cast<int>(rng() % 3);
    ProblemInstance inst = random_instance(rng, K);
    const SolvedDay with_reg = solve_day(inst);
    const SolvedDay no_reg = solve_day(inst, {}, true);
    REQUIRE(with_reg.status == SolveStatus::Optimal);
    REQUIRE(no_reg.status == SolveStatus::Optimal);
    CHECK(with_reg.objective <= no_reg.objective + 1e-9);
    CHECK(no_reg.decision.x_r.cwiseAbs().maxCoeff() <= 1e-12);

    inst.prices.p_r.setZero();
    const SolvedDay a = solve_day(inst);
    const SolvedDay b = solve_day(inst, {}, true);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
  }
}

TEST_CASE("infeasible instance is detected") {
  std::mt19937 rng(113);
  ProblemInstance inst = random_instance(rng, 4);
  // drain far below the reachable range: heavy driving, no charger
  Vec d = Vec::Constant(4, 50.0);
  inst.profile = PeriodProfile(d, Vec::Zero(4), Vec::Zero(4));
  const SolvedDay day = solve_day(inst);
  CHECK(day.status == SolveStatus::Infeasible);
  CHECK(day.decision.x_b.size() == 0);  // no decision carried
}

TEST_CASE("fully consumed charger forces x_r to zero") {
  // driving needs exactly the charger capacity in every parked interval
  ProblemInstance inst;
  inst.battery = {0.0, 100.0, 1.0, 1.0};
  const int K = 4;
  inst.horizon = HorizonSpec::from_intervals(K, 0.5);
  Vec d(K), yp(K), ym(K);
  d << 0, 0, 4, 4;   // 4 kWh of driving energy
  yp << 4, 4, 0, 0;  // the charger must run flat out to recover it
  ym << 4, 4, 0, 0;
  inst.profile = PeriodProfile(d, yp, ym);
  inst.prices.p_b = Vec::Constant(K, 0.2);
  inst.prices.p_r = Vec::Constant(K, 0.01);
  inst.prices.p_a = inst.prices.p_r;
  inst.target = {50.0, 0.0};
  inst.y0_hard = {50.0, 50.0};
  inst.y0_soft = {50.0, 50.0};
  inst.u_hard = UncertaintyWindowSpec(0.5, 1.0, 0.5, K);
  inst.u_soft = UncertaintyWindowSpec(0.5, 2.0, 0.5, K);

  // terminal target pulls the state back up to 50: with driving taking
  // 4 kWh, the purchases must cover it and no reserve headroom remains
  inst.target.y_star = 50.0;
  inst.target.p_star = 10.0;  // make missing the target very expensive
  const SolvedDay day = solve_day(inst);
  REQUIRE(day.status == SolveStatus::Optimal);
  CHECK(day.decision.x_r.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(day.objective ==
        doctest::Approx(expected_cost(day.decision, inst.prices, inst.horizon)).epsilon(1e-9));
}

TEST_CASE("zero objective pressure keeps the zero decision") {
  std::mt19937 rng(127);
  ProblemInstance inst = random_instance(rng, 3);
  inst.profile = PeriodProfile(Vec::Zero(3), Vec::Constant(3, 7.0), Vec::Constant(3, 7.0));
  inst.prices.p_b = Vec::Constant(3, 0.1);
  inst.prices.p_r = Vec::Zero(3);
  inst.prices.p_a = Vec::Zero(3);
  inst.target.p_star = 0.0;
  const SolvedDay day = solve_day(inst);
  REQUIRE(day.status == SolveStatus::Optimal);
  CHECK(day.objective == doctest::Approx(0.0));
  CHECK(day.decision.x_b.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(day.decision.x_r.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("dual blocks certify the oracle worst cases") {
  std::mt19937 rng(131);
  for (int trial = 0; trial < 5; ++trial) {
    const int K = 3 + static_cast<int>(rng() % 3);
    const ProblemInstance inst = random_instance(rng, K);
    const LPModel lp = assemble_lp(inst);
    const SolveResult raw = solve(lp);
    REQUIRE(raw.status == SolveStatus::Optimal);
    const SolvedDay day = extract_decision(lp, raw);

    const double dt = inst.horizon.dt;
    const double gamma = inst.u_hard.b * dt;
    const Vec w_max = inst.battery.eta_plus * day.decision.x_r;
    const Vec w_min = min_soc_weights(day.decision, inst.battery);
    for (int k = 0; k <= K; ++k) {
      const double oracle_max = worst_case_weighted_sum(inst.u_hard, w_max, k).value;
      const double oracle_min = worst_case_weighted_sum(inst.u_hard, w_min, k).value;

      // strong duality: the re-minimized block equals the oracle value
      CHECK(min_dual_block(inst.u_hard, w_max, k) == doctest::Approx(dt * oracle_max).epsilon(1e-8));
      CHECK(min_dual_block(inst.u_hard, w_min, k) == doctest::Approx(dt * oracle_min).epsilon(1e-8));

      // weak duality: the blocks reported by the LP dominate the oracle
      const double block_max = dual_block_value(lp, day.primal, k, +1, K, dt, gamma);
      const double block_min = dual_block_value(lp, day.primal, k, -1, K, dt, gamma);
      CHECK(block_max >= dt * oracle_max - 1e-8);
      CHECK(block_min >= dt * oracle_min - 1e-8);
    }
  }
}

TEST_CASE("scenario soundness: exhaustive binary simulation stays in range") {
  std::mt19937 rng(137);
  for (int trial = 0; trial < 6; ++trial) {
    const int K = 3 + static_cast<int>(rng() % 4);
    const ProblemInstance inst = random_instance(rng, K);
    const SolvedDay day = solve_day(inst);
    REQUIRE(day.status == SolveStatus::Optimal);
    for (const Vec& s : enumerate_binary_scenarios(inst.u_hard)) {
      for (double y0 : {inst.y0_hard.lo, inst.y0_hard.hi}) {
        const Vec up = soc_trajectory(day.decision, s, y0, inst.battery, inst.profile.d,
                                      inst.horizon.dt);
        CHECK(up.maxCoeff() <= inst.battery.y_max + 1e-6);
        const Vec down = soc_trajectory(day.decision, -s, y0, inst.battery, inst.profile.d,
                                        inst.horizon.dt);
        CHECK(down.minCoeff() >= inst.battery.y_min - 1e-6);
      }
    }
  }
}

TEST_CASE("solved LPs certify") {
  std::mt19937 rng(139);
  const ProblemInstance inst = random_instance(rng, 6);
  const LPModel lp = assemble_lp(inst);
  const SolveResult raw = solve(lp);
  REQUIRE(raw.status == SolveStatus::Optimal);
  const auto cert = certify(lp, raw);
  CHECK(cert.ok);
}
