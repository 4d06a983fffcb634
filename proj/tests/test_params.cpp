#include <doctest.h>

#include "iadmm/errors.hpp"
#include "iadmm/params.hpp"
#include "oracles.hpp"

using namespace iadmm;

namespace {
bool has_violation(const ValidationReport& r, const std::string& condition, long index = -1) {
  for (const auto& v : r.violations) {
    if (v.condition == condition && (index < 0 || v.first_index == index)) return true;
  }
  return false;
}
}  // namespace

TEST_CASE("max_relaxation") {
  CHECK(max_relaxation(0.0, 0.01, 1.0) == doctest::Approx(1.9801980198019802).epsilon(1e-15));
  // 2 (1 - 0.1 (0.11 + 0.1 + 0.01)) / (1 + 0.11 + 0.1 + 0.01)
  CHECK(max_relaxation(0.1, 0.01, 1.0) == doctest::Approx(1.603278688524590).epsilon(1e-14));
  CHECK_THROWS_AS(max_relaxation(0.5, 0.01, 0.1), InfeasibleParameters);
  CHECK_THROWS_WITH_AS(max_relaxation(0.5, 0.01, 0.1), doctest::Contains("must exceed"), InfeasibleParameters);
}

TEST_CASE("delta_lower_bound") {
  CHECK(delta_lower_bound(0.0, 0.3) == 0.0);
  CHECK(delta_lower_bound(0.1, 0.01) == doctest::Approx(0.012121212121212121).epsilon(1e-15));
  CHECK(delta_lower_bound(0.5, 0.01) == doctest::Approx(0.38 / 0.75));
  const double big = delta_lower_bound(0.9, 0.01);
  CHECK(std::isfinite(big));
  CHECK(big > 1.0);
  CHECK_THROWS_WITH_AS(delta_lower_bound(1.0, 0.01), doctest::Contains("α must lie in [0,1)"), InputError);
}

TEST_CASE("delta_roots") {
  const auto roots = delta_roots(0.5, 0.05, 0.01);
  REQUIRE(roots.has_value());
  CHECK(roots->first == doctest::Approx(18.643295176694072).epsilon(1e-13));
  CHECK(roots->second == doctest::Approx(0.0067048233059283496).epsilon(1e-13));
  CHECK(max_relaxation(0.05, 0.01, roots->first) / 2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(max_relaxation(0.05, 0.01, roots->second) / 2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(delta_roots(0.99, 0.9, 1.0).has_value());
  CHECK(delta_roots_feasibility(0.99, 0.9, 1.0) > 1.0);
}

TEST_CASE("max_relaxation stays in (0, 2) over random feasible triples") {
  oracle::Rng rng(31);
  for (int t = 0; t < 2000; ++t) {
    const double alpha = rng.uniform(0.0, 0.95), sigma = std::exp(rng.uniform(-6.0, 2.0));
    const double delta = delta_lower_bound(alpha, sigma) * (1.0 + std::exp(rng.uniform(-8.0, 3.0))) + (alpha == 0 ? 0.1 : 0);
    const double lm = max_relaxation(alpha, sigma, delta);
    CHECK(lm > 0.0);
    CHECK(lm < 2.0);
  }
}

TEST_CASE("schedules") {
  const Schedule c = Schedule::constant(0.3);
  CHECK(c(1) == 0.3);
  CHECK(c(1000) == 0.3);
  const Schedule r = Schedule::ramp(0.0, 0.4, 3, 4);
  CHECK(r(1) == 0.0);
  CHECK(r(3) == 0.0);
  CHECK(r(5) == doctest::Approx(0.2));
  CHECK(r(7) == 0.4);
  CHECK(r(100) == 0.4);
  CHECK(r.final_value() == 0.4);
}

TEST_CASE("validate: classical regime is valid") {
  InertialParams p;
  p.alpha = 0.0;
  p.sigma = 0.01;
  p.delta = 1.0;
  p.lambda_lower = 1.0;
  p.alpha_schedule = Schedule::constant(0.0);
  p.lambda_schedule = Schedule::constant(1.0);
  p.init_mode = InitMode::Alpha2Zero;
  CHECK(validate(p, 1000).ok());
  CHECK_NOTHROW(require_valid(p, 1000));
}

TEST_CASE("validate: decreasing alpha is reported") {
  InertialParams p = InertialParams::preset(0.2);
  p.alpha_schedule = Schedule::ramp(0.2, 0.1, 5, 1);
  const auto r = validate(p, 100);
  CHECK(has_violation(r, "nondecreasing", 6));
  CHECK_THROWS_AS(require_valid(p, 100), InfeasibleParameters);
}

TEST_CASE("validate: alpha_2 > 0 with lambda_1 != 0 breaks the init condition") {
  InertialParams p = InertialParams::preset(0.3);
  p.init_mode = InitMode::Alpha2Zero;
  const auto r = validate(p, 10);
  CHECK(has_violation(r, "init condition"));
  p.init_mode = InitMode::Lambda1Alpha1Zero;
  CHECK(validate(p, 10).ok());
}

TEST_CASE("validate: relaxation above the maximum") {
  InertialParams p = InertialParams::preset(0.2);
  p.lambda_schedule = Schedule::constant(1.9);
  p.lambda_lower = 0.5;
  CHECK(has_violation(validate(p, 10), "λ̲ <= λ_k <= λ_max", 2));
}

TEST_CASE("preset values") {
  const InertialParams p = InertialParams::preset(0.2);
  CHECK(p.sigma == 0.01);
  CHECK(p.delta == doctest::Approx(1.5 * delta_lower_bound(0.2, 0.01)));
  CHECK(p.lambda_schedule(5) == doctest::Approx(0.9 * max_relaxation(0.2, 0.01, p.delta)));
  CHECK(p.alpha_at(1) == 0.0);
  CHECK(p.lambda_at(1) == 0.0);
  CHECK(p.alpha_at(2) == 0.2);
  CHECK(validate(p, 1000).ok());
  const InertialParams r = InertialParams::relaxed(1.5);
  CHECK(r.alpha_at(1) == 0.0);
  CHECK(r.lambda_at(1) == 1.5);
  CHECK(validate(r, 1000).ok());
}
