#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "wsf/error.hpp"
#include "wsf/martingale.hpp"
#include "wsf/potential.hpp"
#include "wsf/sampler.hpp"
#include "wsf/util.hpp"

using namespace wsf;
using net::ComponentSample;
using net::SphericalProfile;
namespace mart = wsf::martingale;

namespace {
ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}
}  // namespace

TEST_CASE("law names round trip") {
  CHECK(mart::law_name(mart::Law::Perc) == std::string("perc"));
  CHECK(mart::law_name(mart::Law::RayPerc) == std::string("rayperc"));
  CHECK(mart::law_name(mart::Law::PercConditionedSurvival) == std::string("survival"));
  CHECK(mart::law_from_name("rayperc") == mart::Law::RayPerc);
  CHECK(code_of([] { mart::law_from_name("bogus"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("w values by hand") {
  auto profile = SphericalProfile::binary(10);
  ComponentSample one(2);
  one.insert({0});
  // W_1 = |t_1| L_0 / (|T_1| L_1) = 1 / (2 * 1/2) = 1, W_2 = 0
  CHECK(mart::w_value(one, profile, 0) == 1.0);
  CHECK(mart::w_value(one, profile, 1) == 1.0);
  CHECK(mart::w_value(one, profile, 2) == 0.0);

  ComponentSample both(1);
  both.insert({0});
  both.insert({1});
  CHECK(mart::w_value(both, profile, 1) == 2.0);

  CHECK(code_of([&] { mart::w_value(one, profile, 3); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("density identity is exact") {
  // binary goes through integer fractions: the error is identically zero
  for (int depth = 0; depth <= 4; ++depth)
    CHECK(mart::rn_identity_check(SphericalProfile::binary(10), depth) == 0.0);

  // floating path stays at rounding level, far below the acceptance bars
  CHECK(mart::rn_identity_check(SphericalProfile::poly(2.0, 10), 3) <= 1e-10);
  CHECK(mart::rn_identity_check(SphericalProfile::geometric(3, 10), 2) <= 1e-10);

  // binary depth 5 has ~2e11 subtrees; the budget refuses
  CHECK(code_of([] { mart::rn_identity_check(SphericalProfile::binary(10), 5); }) ==
        ErrorCode::EnumerationTooLarge);
  CHECK(code_of([] { mart::rn_identity_check(SphericalProfile::geometric(1, 10), 2); }) ==
        ErrorCode::RecurrentProfile);
}

TEST_CASE("trajectory batches are deterministic and honor the substream map") {
  auto profile = SphericalProfile::binary(20);
  RngSeed seed(404);
  auto batch = mart::trajectory_batch(profile, 6, 2500, mart::Law::RayPerc, seed);
  REQUIRE(batch.trajectories.size() == 2500);
  CHECK(batch.law == mart::Law::RayPerc);

  // identical rerun, including through the threaded path
  auto batch2 = mart::trajectory_batch(profile, 6, 2500, mart::Law::RayPerc, seed);
  for (std::size_t r = 0; r < batch.trajectories.size(); ++r)
    REQUIRE(batch.trajectories[r].w == batch2.trajectories[r].w);

  // replica r is exactly the component drawn from seed.child(r)
  for (std::uint32_t r = 0; r < 50; ++r) {
    auto comp = sampler::root_component_sample(profile, 6, seed.child(r));
    for (int n = 0; n <= 6; ++n)
      REQUIRE(batch.trajectories[r].w[std::size_t(n)] == mart::w_value(comp, profile, n));
  }

  // level summaries match a direct recount
  std::vector<double> col(batch.trajectories.size());
  for (std::size_t r = 0; r < col.size(); ++r) col[r] = batch.trajectories[r].w[3];
  double mean = 0;
  for (double v : col) mean += v;
  mean /= double(col.size());
  std::sort(col.begin(), col.end());
  CHECK(batch.levels[3].mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(batch.levels[3].median == quantile_sorted(col, 0.5));
  CHECK(batch.levels[3].q25 == quantile_sorted(col, 0.25));
  CHECK(batch.levels[3].q75 == quantile_sorted(col, 0.75));
}

TEST_CASE("perc trajectories are a mean-one martingale, survival stays positive") {
  auto profile = SphericalProfile::binary(20);
  auto perc = mart::trajectory_batch(profile, 6, 20000, mart::Law::Perc, RngSeed(7));
  for (int n = 0; n <= 6; ++n) {
    const auto& s = perc.levels[std::size_t(n)];
    CHECK(std::abs(s.mean - 1.0) <= 5.0 * s.se_mean + 1e-12);
  }

  auto surv = mart::trajectory_batch(profile, 6, 2000, mart::Law::PercConditionedSurvival, RngSeed(8));
  for (const auto& t : surv.trajectories) {
    REQUIRE(t.w.back() > 0.0);
    REQUIRE(t.law == mart::Law::PercConditionedSurvival);
  }
}

TEST_CASE("diagnosis verdicts") {
  auto bin = SphericalProfile::binary(20);
  auto ray = mart::trajectory_batch(bin, 8, 3000, mart::Law::RayPerc, RngSeed(21));
  auto rep = mart::tolerance_diagnosis(ray.trajectories, bin);
  CHECK(rep.verdict == "CONSISTENT-WITH-DIVERGENCE");
  CHECK(rep.heuristic);
  CHECK(rep.replicas == 3000);
  CHECK(rep.slope_expected == doctest::Approx(0.5).epsilon(1e-12));
  for (int n = 0; n <= 8; ++n)
    CHECK(rep.expected_curve[std::size_t(n)] == potential::expected_w(bin, n));

  auto poly = SphericalProfile::poly(2.0, 20);
  auto ray2 = mart::trajectory_batch(poly, 10, 3000, mart::Law::RayPerc, RngSeed(22));
  CHECK(mart::tolerance_diagnosis(ray2.trajectories, poly).verdict ==
        "CONSISTENT-WITH-BOUNDEDNESS");

  // survival trajectories enrich the report with positive lower quantiles
  auto surv = mart::trajectory_batch(bin, 8, 500, mart::Law::PercConditionedSurvival, RngSeed(23));
  auto mixed = ray.trajectories;
  mixed.insert(mixed.end(), surv.trajectories.begin(), surv.trajectories.end());
  auto rep2 = mart::tolerance_diagnosis(mixed, bin);
  REQUIRE(rep2.survival_quantile_levels == std::vector<double>{0.01, 0.05, 0.10, 0.25});
  REQUIRE(rep2.survival_w_quantiles.size() == 4);
  for (double q : rep2.survival_w_quantiles) CHECK(q > 0.0);
  CHECK(rep2.replicas == 3000);  // survival rows do not count as evidence

  CHECK(code_of([&] {
          auto small = mart::trajectory_batch(bin, 8, 99, mart::Law::RayPerc, RngSeed(1));
          mart::tolerance_diagnosis(small.trajectories, bin);
        }) == ErrorCode::InsufficientData);
  CHECK(code_of([&] {
          auto percs = mart::trajectory_batch(bin, 8, 500, mart::Law::Perc, RngSeed(2));
          mart::tolerance_diagnosis(percs.trajectories, bin);
        }) == ErrorCode::InsufficientData);
  CHECK(code_of([&] {
          auto shallow = mart::trajectory_batch(bin, 1, 500, mart::Law::RayPerc, RngSeed(3));
          mart::tolerance_diagnosis(shallow.trajectories, bin);
        }) == ErrorCode::InsufficientData);
}
