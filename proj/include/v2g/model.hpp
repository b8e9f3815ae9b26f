#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>

// Core domain types and battery/market dynamics. Units are fixed throughout
// the library: power in kW, energy in kWh, time in hours, money in EUR.
namespace v2g {

using Vec = Eigen::VectorXd;

/// Nominal grid frequency and the deviation normalization threshold.
struct GridConfig {
  double f0 = 50.0;       // Hz
  double delta_f = 0.2;   // Hz

  void validate() const {
    if (!(f0 > 0.0)) throw std::invalid_argument("GridConfig: f0 must be positive");
    if (!(delta_f > 0.0)) throw std::invalid_argument("GridConfig: delta_f must be positive");
  }
};

/// State-of-charge limits and charger conversion efficiencies.
struct BatteryParams {
  double y_min = 10.0;     // kWh
  double y_max = 40.0;     // kWh
  double eta_plus = 0.85;  // charging efficiency, in (0,1]
  double eta_minus = 0.85; // discharging efficiency, in (0,1]

  // 1/eta_minus - eta_plus: state-of-charge lost by charging and then
  // discharging one grid-side unit of energy. Nonnegative for valid params.
  double delta_eta() const { return 1.0 / eta_minus - eta_plus; }

  void validate() const {
    if (!(y_min >= 0.0 && y_min < y_max))
      throw std::invalid_argument("BatteryParams: require 0 <= y_min < y_max");
    if (!(eta_plus > 0.0 && eta_plus <= 1.0))
      throw std::invalid_argument("BatteryParams: eta_plus must lie in (0,1]");
    if (!(eta_minus > 0.0 && eta_minus <= 1.0))
      throw std::invalid_argument("BatteryParams: eta_minus must lie in (0,1]");
  }
};

/// Planning horizon split into K trading intervals of length dt.
struct HorizonSpec {
  double T = 24.0;  // h
  double dt = 0.5;  // h
  int K = 48;

  static HorizonSpec from_intervals(int K, double dt) {
    HorizonSpec h;
    h.K = K;
    h.dt = dt;
    h.T = K * dt;
    h.validate();
    return h;
  }

  void validate() const {
    if (K < 1) throw std::invalid_argument("HorizonSpec: K must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("HorizonSpec: dt must be positive");
    if (std::abs(K * dt - T) > 1e-9 * std::max(1.0, T))
      throw std::invalid_argument("HorizonSpec: K*dt must equal T exactly");
  }
};

/// Per-interval driving power and charger power limits. Intervals with
/// positive driving power are treated as disconnected: the constructor
/// forces both charger limits to zero there.
struct PeriodProfile {
  Vec d;           // kW, length K
  Vec ybar_plus;   // kW, max power drawn from the grid
  Vec ybar_minus;  // kW, max power fed into the grid

  PeriodProfile() = default;
  PeriodProfile(Vec driving, Vec charge_limit, Vec discharge_limit)
      : d(std::move(driving)),
        ybar_plus(std::move(charge_limit)),
        ybar_minus(std::move(discharge_limit)) {
    if (d.size() != ybar_plus.size() || d.size() != ybar_minus.size())
      throw std::invalid_argument("PeriodProfile: vectors must have equal length");
    if ((d.array() < 0).any() || (ybar_plus.array() < 0).any() || (ybar_minus.array() < 0).any())
      throw std::invalid_argument("PeriodProfile: entries must be nonnegative");
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      if (d[k] > 0.0) {
        ybar_plus[k] = 0.0;
        ybar_minus[k] = 0.0;
      }
    }
  }

  int size() const { return static_cast<int>(d.size()); }
};

/// Utility, regulation, availability and (optional) delivery prices.
/// p_r is the expected regulation price; absent delivery-price data it
/// coincides with the availability price p_a.
struct PriceProfile {
  Vec p_b;                  // EUR/kWh
  Vec p_r;                  // EUR/kW/h
  Vec p_a;                  // EUR/kW/h
  std::optional<Vec> p_d;   // EUR/kWh, realized delivery prices if known

  void validate(int K) const {
    if (p_b.size() != K || p_r.size() != K || p_a.size() != K)
      throw std::invalid_argument("PriceProfile: vectors must have length K");
    if ((p_a.array() < 0).any())
      throw std::invalid_argument("PriceProfile: availability prices must be nonnegative");
  }
};

/// Desired terminal state-of-charge and the price of missing it.
struct TerminalTarget {
  double y_star = 27.0;   // kWh
  double p_star = 0.15;   // EUR/kWh

  void validate(const BatteryParams& b) const {
    if (!(y_star >= b.y_min && y_star <= b.y_max))
      throw std::invalid_argument("TerminalTarget: y_star must lie in [y_min, y_max]");
    if (!(p_star >= 0.0))
      throw std::invalid_argument("TerminalTarget: p_star must be nonnegative");
  }
};

/// Closed interval of possible initial states-of-charge.
struct SoCInterval {
  double lo = 0.0;  // kWh
  double hi = 0.0;  // kWh

  void validate(const BatteryParams& b) const {
    if (!(b.y_min <= lo && lo <= hi && hi <= b.y_max))
      throw std::invalid_argument("SoCInterval: require y_min <= lo <= hi <= y_max");
  }
};

/// Day-ahead market commitments: purchases x_b and reserve offers x_r.
struct MarketDecision {
  Vec x_b;  // kW, length K
  Vec x_r;  // kW, length K

  static MarketDecision zero(int K) { return {Vec::Zero(K), Vec::Zero(K)}; }

  void validate() const {
    if (x_b.size() != x_r.size())
      throw std::invalid_argument("MarketDecision: vectors must have equal length");
    if ((x_b.array() < -1e-12).any() || (x_r.array() < -1e-12).any())
      throw std::invalid_argument("MarketDecision: entries must be nonnegative");
  }

  int size() const { return static_cast<int>(x_b.size()); }
};

/// Normalized grid-frequency deviation, clipped to [-1, 1].
double delta_from_frequency(double f, const GridConfig& grid);

/// Split a net grid flow x_b + delta*x_r into (charge, discharge) rates.
/// Exactly one of the two is nonzero unless both vanish.
std::pair<double, double> net_flow_split(double x_b_k, double x_r_k, double delta_k);

// Planning-model state-of-charge after each trading interval (length K+1,
// starting at y0). Uses the single min-form expression
//   y_k = y_{k-1} + dt*(min{eta+ * n, n / eta-} - d_k),  n = x_b_k + delta_k x_r_k,
// which agrees with the [.]+/[.]- split because eta+ <= 1/eta-. No clipping:
// these are the planning dynamics, not the simulator dynamics.
Vec soc_trajectory(const MarketDecision& x, const Vec& delta, double y0,
                   const BatteryParams& battery, const Vec& d, double dt);

/// Expected cost dt * sum_k (p_b_k x_b_k - p_r_k x_r_k) in EUR.
double expected_cost(const MarketDecision& x, const PriceProfile& prices, const HorizonSpec& horizon);

}  // namespace v2g
