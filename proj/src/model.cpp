#include "v2g/model.hpp"

#include <cmath>

namespace v2g {

double delta_from_frequency(double f, const GridConfig& grid) {
  grid.validate();
  if (!std::isfinite(f))
    throw std::invalid_argument("delta_from_frequency: frequency must be finite");
  const double raw = (f - grid.f0) / grid.delta_f;
  return std::clamp(raw, -1.0, 1.0);
}

std::pair<double, double> net_flow_split(double x_b_k, double x_r_k, double delta_k) {
  const double net = x_b_k + delta_k * x_r_k;
  return {std::max(net, 0.0), std::max(-net, 0.0)};
}

Vec soc_trajectory(const MarketDecision& x, const Vec& delta, double y0,
                   const BatteryParams& battery, const Vec& d, double dt) {
  const Eigen::Index K = x.x_b.size();
  if (delta.size() != K || x.x_r.size() != K || d.size() != K)
    throw std::invalid_argument("soc_trajectory: dimension mismatch");
  Vec y(K + 1);
  y[0] = y0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const double n = x.x_b[k] + delta[k] * x.x_r[k];
    const double flow = std::min(battery.eta_plus * n, n / battery.eta_minus);
    y[k + 1] = y[k] + dt * (flow - d[k]);
  }
  return y;
}

double expected_cost(const MarketDecision& x, const PriceProfile& prices, const HorizonSpec& horizon) {
  if (x.x_b.size() != horizon.K || prices.p_b.size() != horizon.K || prices.p_r.size() != horizon.K)
    throw std::invalid_argument("expected_cost: dimension mismatch");
  return horizon.dt * (prices.p_b.dot(x.x_b) - prices.p_r.dot(x.x_r));
}

}  // namespace v2g
