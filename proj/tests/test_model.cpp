#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chemospread/model.hpp"

using namespace chemospread;

TEST_CASE("kpp_speed is derived from a", "[model]") {
  ModelParams p;
  CHECK(p.kpp_speed() == 2.0);
  p.a = 4.0;
  CHECK(p.kpp_speed() == 4.0);
  CHECK(p.carrying_capacity() == 4.0);
  p.sigma = 2.0;
  CHECK(p.carrying_capacity() == Catch::Approx(2.0));
}

TEST_CASE("validate accepts the reference configuration", "[model]") {
  ModelParams p;  // a = b = 1
  GridSpec g;     // h = 0.1, dt = 0.002
  auto r = validate(p, g);
  CHECK(r.ok());
  CHECK(r.warnings.empty());
  CHECK(g.diffusive_ratio() == Catch::Approx(0.2));
}

TEST_CASE("validate rejects dt/h^2 at the stability boundary", "[model]") {
  ModelParams p;
  GridSpec g;
  g.dt = 0.005;  // ratio exactly 0.5, not < 0.5
  auto r = validate(p, g);
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.front().find("diffusive ratio") != std::string::npos);
}

TEST_CASE("advective ratio is a warning, not an error", "[model]") {
  ModelParams p;
  p.c = 3.0;
  p.chi = 10.0;
  GridSpec g;
  // (|c|*max(1,tau) + |chi|*G)*dt/h = 13*0.02 = 0.26 < 1: no warning
  CHECK(validate(p, g).warnings.empty());
  // dt = 0.01 pushes it to 1.3 >= 1 (and also trips the diffusive bound)
  g.dt = 0.01;
  auto r = validate(p, g);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings.front().find("advective ratio") != std::string::npos);
  CHECK_FALSE(r.ok());
}

TEST_CASE("validate flags nonpositive coefficients and bad grids", "[model]") {
  GridSpec g;
  ModelParams p;
  p.a = 0.0;
  CHECK_FALSE(validate(p, g).ok());
  p = ModelParams{};
  p.tau = -1.0;
  CHECK_FALSE(validate(p, g).ok());
  p = ModelParams{};
  g.M = 3;
  CHECK_FALSE(validate(p, g).ok());
  g = GridSpec{};
  g.M = 401;  // odd
  CHECK_FALSE(validate(p, g).ok());
  g = GridSpec{};
  g.T = -1.0;
  CHECK_FALSE(validate(p, g).ok());
  g.T = 0.0;  // zero-step run is allowed
  CHECK(validate(p, g).ok());
  CHECK(g.steps() == 0);
}

TEST_CASE("validate warns when u0 support crowds the boundary", "[model]") {
  ModelParams p;
  GridSpec g;
  g.L = 2.5;
  g.M = 50;  // h = 0.1
  auto init = InitialData::paper_bump();  // support radius 1, margin 1.5 < 2
  auto r = validate(p, g, &init);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings.front().find("support") != std::string::npos);
}

TEST_CASE("validate is pure", "[model]") {
  ModelParams p;
  p.c = 3.0;
  GridSpec g;
  g.dt = 0.0049;
  auto r1 = validate(p, g);
  auto r2 = validate(p, g);
  CHECK(r1.errors == r2.errors);
  CHECK(r1.warnings == r2.warnings);
}

TEST_CASE("paper bump evaluates exactly", "[model]") {
  auto init = InitialData::paper_bump();
  CHECK(init.u0(0.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(init.u0(1.0) == 0.0);
  CHECK(init.u0(-1.0) == 0.0);
  CHECK(init.u0(1.0 - 5e-13) == 0.0);  // overflow guard region
  CHECK(init.u0(2.0) == 0.0);
  CHECK(init.v0(0.37) == 1.0);
  CHECK(init.v0_max() == 1.0);
}

TEST_CASE("sample_initial satisfies the field invariants", "[model]") {
  GridSpec g;
  auto s = sample_initial(InitialData::paper_bump(), g);
  REQUIRE(s.u.size() == static_cast<std::size_t>(g.nodes()));
  REQUIRE(s.v.size() == s.u.size());
  CHECK(s.u[0] == 0.0);
  CHECK(s.u[g.M] == 0.0);
  CHECK(s.v[0] == s.v[1]);
  CHECK(s.v[g.M] == s.v[g.M - 1]);
  for (int i = 0; i <= g.M; ++i) {
    CHECK(s.u[i] >= 0.0);
    CHECK(s.v[i] == 1.0);
  }
  // node at x = 0 carries the bump peak
  CHECK(s.u[g.M / 2] == Catch::Approx(std::exp(-1.0)).epsilon(1e-15));
  // support strictly inside (-1, 1)
  for (int i = 0; i <= g.M; ++i)
    if (std::abs(g.x(i)) >= 1.0) CHECK(s.u[i] == 0.0);
}

TEST_CASE("custom profiles are rejected with the offending index", "[model]") {
  GridSpec g;
  g.L = 2.0;
  g.M = 40;
  auto bad_u = InitialData::custom(
      [](double x) { return x > 0.5 ? -1.0 : 0.1; }, [](double) { return 1.0; },
      2.0, 1.0);
  try {
    sample_initial(bad_u, g);
    FAIL("expected InvalidInitialData");
  } catch (const InvalidInitialData& e) {
    CHECK(g.x(e.index) > 0.5);
  }
  auto bad_v = InitialData::custom(
      [](double) { return 0.0; }, [](double) { return 2.0; }, 2.0, 1.0);
  CHECK_THROWS_AS(sample_initial(bad_v, g), InvalidInitialData);
  auto nan_u = InitialData::custom(
      [](double x) { return x == 0.0 ? std::nan("") : 0.0; },
      [](double) { return 1.0; }, 2.0, 1.0);
  CHECK_THROWS_AS(sample_initial(nan_u, g), InvalidInitialData);
}
