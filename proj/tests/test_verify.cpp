#include <doctest.h>

#include <sstream>

#include "v2g/verify.hpp"

using namespace v2g;

TEST_CASE("the full verification suite passes") {
  VerifyOptions opts;
  opts.seed = 3;
  const auto checks = run_verification(opts);
  REQUIRE(!checks.empty());
  for (const auto& c : checks) {
    INFO(c.id, " observed=", c.observed, " bound=", c.bound);
    CHECK(c.pass);
  }
  std::ostringstream os;
  write_check_csv(checks, os, "v2g test");
  CHECK(os.str().find("binary_vertices") != std::string::npos);
}

TEST_CASE("dual tightness flags a corrupted epigraph vector") {
  const UncertaintyWindowSpec spec(0.5, 1.5, 0.5, 4);
  const BatteryParams battery{10.0, 40.0, 0.85, 0.85};
  MarketDecision x{Vec::Constant(4, 2.0), Vec::Constant(4, 1.0)};

  const Vec good = min_soc_weights(x, battery);
  CHECK(check_dual_tightness(spec, good, good, 4).pass);

  // sign bug on the delta_eta term inflates the decision-rule slopes
  Vec bad(4);
  for (int l = 0; l < 4; ++l)
    bad[l] = std::max(battery.eta_plus * x.x_r[l],
                      x.x_r[l] / battery.eta_minus + battery.delta_eta() * x.x_b[l]);
  CHECK_FALSE(check_dual_tightness(spec, bad, good, 4).pass);
}
