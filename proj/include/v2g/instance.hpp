#pragma once

#include "v2g/model.hpp"
#include "v2g/uncertainty.hpp"

namespace v2g {

// Everything needed to plan one day: battery and grid data, per-interval
// profiles and prices, the terminal target, the initial state-of-charge
// intervals, and the hard (delivery guarantee) and soft (terminal target)
// uncertainty windows.
struct ProblemInstance {
  GridConfig grid;
  BatteryParams battery;
  HorizonSpec horizon;
  PeriodProfile profile;
  PriceProfile prices;
  TerminalTarget target;
  SoCInterval y0_hard;
  SoCInterval y0_soft;
  UncertaintyWindowSpec u_hard;
  UncertaintyWindowSpec u_soft;

  void validate() const {
    grid.validate();
    battery.validate();
    horizon.validate();
    if (profile.size() != horizon.K)
      throw std::invalid_argument("ProblemInstance: profile length must equal K");
    prices.validate(horizon.K);
    target.validate(battery);
    y0_hard.validate(battery);
    y0_soft.validate(battery);
    auto check_spec = [&](const UncertaintyWindowSpec& u, const char* which) {
      if (u.K != horizon.K || std::abs(u.dt - horizon.dt) > 1e-12)
        throw std::invalid_argument(std::string("ProblemInstance: ") + which +
                                    " window spec does not match the horizon");
    };
    check_spec(u_hard, "hard");
    check_spec(u_soft, "soft");
    // soft set must be contained in the hard set
    if (u_soft.gamma > u_hard.gamma + 1e-12 || u_soft.Gamma < u_hard.Gamma - 1e-12)
      throw std::invalid_argument(
          "ProblemInstance: soft window must satisfy gamma_soft <= gamma and Gamma_soft >= Gamma");
  }
};

}  // namespace v2g
