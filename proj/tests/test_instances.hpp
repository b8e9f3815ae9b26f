#pragma once

#include <random>

#include "v2g/instance.hpp"

// Random feasible planning instances for tests. The initial-state interval
// sits comfortably inside the battery range and driving never exceeds the
// slack below it, so x = 0 is always robust feasible.
inline v2g::ProblemInstance random_instance(std::mt19937& rng, int K, double dt = 0.5) {
  using namespace v2g;
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  ProblemInstance inst;
  const double etas[] = {0.85, 0.9, 1.0};
  const double eta = etas[rng() % 3];
  inst.battery = {10.0, 40.0, eta, eta};
  inst.horizon = HorizonSpec::from_intervals(K, dt);

  Vec d = Vec::Zero(K), yp = Vec::Constant(K, 7.0), ym = Vec::Constant(K, 7.0);
  int driving_left = 2;
  for (int k = 0; k < K && driving_left > 0; ++k) {
    if (u01(rng) < 0.25) {
      d[k] = (2.0 + 4.0 * u01(rng)) / dt * 0.5;  // at most 3 kWh per interval
      --driving_left;
    }
  }
  if (u01(rng) < 0.15) ym.setZero();  // occasionally unidirectional
  inst.profile = PeriodProfile(d, yp, ym);

  inst.prices.p_b = Vec::NullaryExpr(K, [&](Eigen::Index) { return 0.10 + 0.10 * u01(rng); });
  inst.prices.p_a = Vec::NullaryExpr(K, [&](Eigen::Index) { return 0.005 + 0.015 * u01(rng); });
  inst.prices.p_r = inst.prices.p_a;

  inst.target.y_star = 15.0 + 20.0 * u01(rng);
  inst.target.p_star = 0.05 + 0.25 * u01(rng);

  const double c = 18.0 + 12.0 * u01(rng);
  const double h = 3.0 * u01(rng);
  inst.y0_hard = {std::max(17.0, c - h), std::min(31.0, c + h)};
  const double hs = h * u01(rng);
  const double cs = 0.5 * (inst.y0_hard.lo + inst.y0_hard.hi);
  inst.y0_soft = {std::max(inst.y0_hard.lo, cs - hs), std::min(inst.y0_hard.hi, cs + hs)};

  const int w = 2 + static_cast<int>(rng() % 3);
  const int b = 1 + static_cast<int>(rng() % 2);
  inst.u_hard = UncertaintyWindowSpec(std::min(b, w) * dt, w * dt, dt, K);
  inst.u_soft = UncertaintyWindowSpec(std::min(b, w) * dt, std::min(2 * w, K > w ? K : w) * dt, dt, K);
  inst.validate();
  return inst;
}
