#include "doctest.h"

#include <cmath>
#include <numbers>

#include "abh/error.hpp"
#include "abh/params.hpp"
#include "abh/profile.hpp"
#include "abh/quadrature.hpp"

using namespace abh;

namespace {

PhysicalConfig default_ring() { return load_config(default_config_text()); }

SpatialProfile constant_profile(double c, double v, double lo, double hi) {
  SpatialProfile p;
  p.velocity = [v](double) { return v; };
  p.sound_speed = [c](double) { return c; };
  p.lower = lo;
  p.upper = hi;
  return p;
}

// v^2 - c^2 = s (x - x_h) near x_h with c = v_h fixed.
SpatialProfile linear_horizon(double v_h, double slope, double x_h) {
  SpatialProfile p;
  p.velocity = [=](double x) { return std::sqrt(v_h * v_h + slope * (x - x_h)); };
  p.sound_speed = [=](double) { return v_h; };
  p.horizons = {x_h};
  p.lower = x_h - 0.5;
  p.upper = x_h + 0.5;
  return p;
}

}  // namespace

TEST_CASE("ring profile at t = 0 is uniform") {
  const RingProfile ring(default_ring());
  for (double th = 0.0; th < kTwoPi; th += 0.1) {
    CHECK(ring.velocity(th, 0.0) == doctest::Approx(kTwoPi).epsilon(1e-14));
  }
}

TEST_CASE("ring profile asymptotics") {
  const auto cfg = default_ring();
  const RingProfile ring(cfg);
  const double late = 50.0 * cfg.period;
  CHECK(ring.velocity(kPi, late) == doctest::Approx(cfg.v_max).epsilon(1e-14));
  CHECK(ring.velocity(0.2, late) == doctest::Approx(cfg.v_min).epsilon(1e-14));
  const double beta = 0.5 * (cfg.v_max + cfg.v_min);
  CHECK(ring.velocity(cfg.theta_h, late) == doctest::Approx(beta).epsilon(1e-14));
  CHECK(ring.asymptotic_velocity(kPi) == cfg.v_max);
}

TEST_CASE("ring profile is continuous and periodic") {
  const auto cfg = default_ring();
  const RingProfile ring(cfg);
  for (double t : {0.01, 0.05, 0.2, RingProfile::kLate}) {
    for (double b : ring.breakpoints()) {
      CHECK(ring.velocity(b - 1e-12, t) == doctest::Approx(ring.velocity(b + 1e-12, t)).epsilon(1e-9));
    }
    CHECK(ring.velocity(0.0, t) == doctest::Approx(ring.velocity(kTwoPi - 1e-13, t)).epsilon(1e-12));
    CHECK(ring.velocity(-0.3, t) == ring.velocity(kTwoPi - 0.3, t));
  }
}

TEST_CASE("ring profile has two sonic points") {
  const RingProfile ring(default_ring());
  const auto hs = ring.horizons(RingProfile::kLate);
  REQUIRE(hs.size() == 2);
  for (double h : hs) {
    CHECK(std::abs(ring.velocity(h, RingProfile::kLate) - ring.sound_speed(h, RingProfile::kLate)) <
          1e-9);
  }
  CHECK(ring.sonic_velocity() == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(ring.horizons(0.0).size() <= 2);
}

TEST_CASE("sigma") {
  CHECK(sigma(0.0, 1.0) == 0.0);
  CHECK(std::abs(sigma(10.0, 1.0) - 1.0) < 1e-8);
  const double e2 = std::exp(2.0);
  CHECK(sigma(2.0, 2.0) == doctest::Approx((e2 - 1) / (e2 + 1)).epsilon(1e-15));
  double prev = -1.0;
  for (double t = 0.0; t < 20.0; t += 0.25) {
    const double s = sigma(t, 1.5);
    CHECK(s >= prev);
    CHECK(s < 1.0 + 1e-16);
    prev = s;
  }
}

TEST_CASE("sigma_accumulated") {
  CHECK(sigma_accumulated(0.0, 1.0) == 0.0);
  // ln cosh(100) = 100 - ln 2 + ln(1 + e^-200); the last term is far below double resolution.
  CHECK(sigma_accumulated(100.0, 1.0) == doctest::Approx(100.0 - std::numbers::ln2).epsilon(1e-15));
  CHECK(std::abs(sigma_accumulated(40.0, 2.0) - (40.0 - 2.0 * std::numbers::ln2)) < 1e-6);
  SUBCASE("matches the integral of sigma") {
    for (double t : {0.1, 1.0, 3.0, 17.0}) {
      const auto r = integrate_adaptive([](double s) { return sigma(s, 0.7); }, 0.0, t, 1e-14);
      CHECK(sigma_accumulated(t, 0.7) == doctest::Approx(r.value).epsilon(1e-11));
    }
  }
  SUBCASE("derivative equals sigma on a 100-point grid") {
    const double tau = 1.3;
    for (int i = 1; i <= 100; ++i) {
      const double t = 0.05 * i;
      const double h = 1e-4 * tau;
      const double d = (sigma_accumulated(t + h, tau) - sigma_accumulated(t - h, tau)) / (2 * h);
      CHECK(d == doctest::Approx(sigma(t, tau)).epsilon(1e-6));
    }
  }
}

TEST_CASE("line profile") {
  const LineProfile line(0.9, 1.1, 1.0, 1.0);
  CHECK(line.kappa() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(line.velocity(5.0, 0.0) == 0.0);
  for (double t : {0.3, 2.0, 40.0}) {
    CHECK(line.velocity(1.0, t) == doctest::Approx(line.sigma_at(t) * 1.1).epsilon(1e-15));
    CHECK(line.velocity(-1.0, t) == doctest::Approx(line.sigma_at(t) * 0.9).epsilon(1e-15));
    CHECK(line.velocity(1.0 + 1e-12, t) == doctest::Approx(line.velocity(1.0, t)).epsilon(1e-11));
  }
  CHECK(line.region(-3.0) == LineProfile::Region::inner_left);
  CHECK(line.region(0.5) == LineProfile::Region::transition);
  CHECK(line.region(3.0) == LineProfile::Region::outer_right);
  CHECK_THROWS_AS(LineProfile(1.1, 0.9, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(LineProfile(0.9, 1.1, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(LineProfile(0.8, 1.1, 1.0, 1.0), ConfigError);
}

TEST_CASE("null coordinates") {
  SUBCASE("constant sound speed, no flow") {
    const auto p = constant_profile(2.0, 0.0, -5.0, 5.0);
    for (double x : {-4.0, 0.5, 3.0}) {
      CHECK(null_coordinate(p, x, NullBranch::u) == doctest::Approx(x / 2.0).epsilon(1e-13));
    }
  }
  SUBCASE("additivity") {
    const RingProfile ring(default_ring());
    const auto p = ring.snapshot(RingProfile::kLate);
    const double a = 0.3, m = 2.1, b = 5.5;
    const double whole = null_coordinate(p, b, NullBranch::u, 0.0, a);
    const double split =
        null_coordinate(p, m, NullBranch::u, 0.0, a) + null_coordinate(p, b, NullBranch::u, 0.0, m);
    CHECK(whole == doctest::Approx(split).epsilon(1e-11));
  }
  SUBCASE("x_v across a horizon") {
    const RingProfile ring(default_ring());
    const auto p = ring.snapshot(RingProfile::kLate);
    const double h = p.horizons.front();
    CHECK_THROWS_AS(null_coordinate(p, h + 0.2, NullBranch::v, 0.0, h - 0.2), NumericError);
    const double delta = kTwoPi / ring.config().n_ions;
    const double v1 = null_coordinate(p, h + 0.2, NullBranch::v, delta, h - 0.2);
    const double v2 = null_coordinate(p, h + 0.2, NullBranch::v, 2 * delta, h - 0.2);
    CHECK(std::isfinite(v1));
    CHECK(std::isfinite(v2));
    // Principal-value-like cancellation keeps the epsilon dependence small but nonzero.
    MESSAGE("x_v sensitivity to epsilon: ", v1, " vs ", v2);
  }
  SUBCASE("table interpolation agrees with direct quadrature") {
    const RingProfile ring(default_ring());
    const auto p = ring.snapshot(RingProfile::kLate);
    const NullCoordinateTable table(p, NullBranch::u, 0.0);
    for (double x : {0.1, 1.4, 2.9, 4.4, 6.0}) {
      CHECK(table(x) - table(0.0) == doctest::Approx(null_coordinate(p, x, NullBranch::u)).epsilon(1e-9));
    }
    for (std::size_t i = 1; i < table.nodes().size(); ++i) CHECK(table.nodes()[i] > table.nodes()[i - 1]);
  }
}

TEST_CASE("Hawking temperature from the derivative formula") {
  const double v_h = 1.3, s = 0.4;
  const double t1 = hawking_temperature(linear_horizon(v_h, s, 0.0), 0.0);
  CHECK(t1 == doctest::Approx(s / (4 * kPi * v_h)).epsilon(1e-10));
  const double t2 = hawking_temperature(linear_horizon(v_h, 2 * s, 0.0), 0.0);
  CHECK(t2 == doctest::Approx(2 * t1).epsilon(1e-10));
  CHECK(hawking_temperature(linear_horizon(v_h, s, 0.0), 0.0, 2.0, 4.0) ==
        doctest::Approx(t1 / 2).epsilon(1e-10));
}

TEST_CASE("symmetric ring gives equal-magnitude temperatures") {
  auto cfg = default_ring();
  cfg.gamma2 = cfg.gamma1;
  const auto temps = hawking_temperature_ring(RingProfile(cfg));
  REQUIRE(temps.size() == 2);
  CHECK(std::abs(temps[0]) == doctest::Approx(std::abs(temps[1])).epsilon(1e-9));
  CHECK(temps[0] * temps[1] < 0);
}

TEST_CASE("ring without a sonic point") {
  auto cfg = default_ring();
  cfg.ion_charge *= 2.0;  // sonic velocity rises by 2^(2/3), above v_max
  CHECK_THROWS_AS(hawking_temperature_ring(RingProfile(cfg)), RegimeError);
}

TEST_CASE("line Hawking temperature") {
  CHECK(hawking_temperature_line(1.1, 0.9, 1.0) == doctest::Approx(0.2 / (4 * kPi)).epsilon(1e-15));
  CHECK(hawking_temperature_line(1.0, 1.0, 1.0) == 0.0);
  CHECK(hawking_temperature_line(1.1, 0.9, 2.0) ==
        doctest::Approx(0.5 * hawking_temperature_line(1.1, 0.9, 1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(hawking_temperature_line(1.1, 0.9, 0.0), ConfigError);
}

TEST_CASE("line temperature equals the derivative formula on the linearized profile") {
  const LineProfile line(0.9, 1.1, 1.0, 1.0);
  SpatialProfile p;
  p.velocity = [&](double x) { return line.shape(x); };
  p.sound_speed = [](double) { return 1.0; };
  p.breakpoints = {-1.0, 1.0};
  p.horizons = {0.0};
  p.lower = -3.0;
  p.upper = 3.0;
  CHECK(hawking_temperature(p, 0.0) ==
        doctest::Approx(hawking_temperature_line(1.1, 0.9, 1.0)).epsilon(1e-6));
}
