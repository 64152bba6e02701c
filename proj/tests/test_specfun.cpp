#include "doctest.h"

#include <cmath>
#include <numbers>
#include <limits>

#include <boost/math/special_functions/expint.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "abh/error.hpp"
#include "abh/params.hpp"
#include "abh/quadrature.hpp"
#include "abh/specfun.hpp"

using namespace abh;
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<240>>;

namespace {


bool close_rel(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::abs(want);
}

// Shi and Chi from Ei and E1 in 240-digit arithmetic.
Big big_shi(const Big& x) {
  return (boost::math::expint(x) + boost::math::expint(1, x)) / 2;
}
Big big_chi(const Big& x) {
  return (boost::math::expint(x) - boost::math::expint(1, x)) / 2;
}

}  // namespace

TEST_CASE("si frozen values") {
  // 50-digit reference values.
  CHECK(si(0.0) == 0.0);
  CHECK(close_rel(si(1.0), 0.94608307036718301494135331382317965781, 1e-14));
  CHECK(close_rel(si(10.0), 1.65834759421887404933097187938967248063, 1e-14));
  CHECK(close_rel(si(20.0 * kPi), 1.55488887104474474688145420658436583420, 1e-14));
  CHECK(close_rel(si(1e6), 1.57079539004311908146220820114212855673, 1e-14));
}

TEST_CASE("si agrees with quadrature of sin t / t on [0, 1]") {
  QuadratureOptions o;
  o.abs_tol = 1e-14;
  const auto q = integrate_adaptive([](double t) { return std::sin(t) / t; }, 0.0, 1.0, o);
  CHECK(std::abs(q.value - si(1.0)) < 1e-12);
}

TEST_CASE("si approaches pi/2 within 2/x") {
  for (double x : {1.0, 3.0, 10.0, 100.0, 1e3, 1e4, 1e6}) {
    CHECK(std::abs(si(x) - kPi / 2) <= 2.0 / x);
  }
  CHECK(std::abs(si(1e6) - kPi / 2) <= 2e-6);
}

TEST_CASE("si and shi are odd") {
  for (double x : {0.1, 1.0, 5.0, 40.0}) {
    CHECK(si(-x) == -si(x));
    CHECK(shi(-x) == -shi(x));
  }
}

TEST_CASE("shi and chi against extended-precision exponential integrals") {
  CHECK(shi(0.0) == 0.0);
  for (double x : {0.5, 2.0, 7.5, 30.0}) {
    const double s = static_cast<double>(big_shi(Big(x)));
    const double c = static_cast<double>(big_chi(Big(x)));
    CHECK(close_rel(shi(x), s, 1e-13));
    CHECK(close_rel(chi(x), c, 1e-12));
  }
  CHECK(close_rel(shi(2.0), 2.50156743335497564147337248272754239892, 1e-14));
  CHECK(close_rel(chi(2.0), 2.45266692264691452190613264749949287660, 1e-14));
}

TEST_CASE("chi small-argument limit and domain") {
  const double x = 1e-6;
  CHECK(std::abs(chi(x) - std::log(x) - std::numbers::egamma) < 1e-10);
  CHECK_THROWS_AS(chi(0.0), NumericError);
  CHECK_THROWS_AS(chi(-1.0), NumericError);
}

TEST_CASE("exponential integrals") {
  CHECK(close_rel(expint_e1(2.0), 0.04890051070806111956723983522804952231, 1e-14));
  CHECK(close_rel(expint_ei(2.0), 4.95423435600189016337950513022703527552, 1e-14));
  CHECK(close_rel(scaled_ei(50.0), 105856368971316909630.615414332299871951 * std::exp(-50.0), 1e-13));
  CHECK(close_rel(scaled_e1(2.0), 0.04890051070806111956723983522804952231 * std::exp(2.0), 1e-14));
  CHECK_THROWS_AS(expint_e1(0.0), NumericError);
}

TEST_CASE("stable combination") {
  auto naive = [](double a, double b, double x) {
    return a * (shi(x) * std::cosh(x) - chi(x) * std::sinh(x)) +
           b * (shi(x) * std::sinh(x) - chi(x) * std::cosh(x));
  };
  CHECK(stable_shi_chi_combo(1.0, 1.0, 0.0) == 0.0);
  CHECK(close_rel(stable_shi_chi_combo(1.0, 0.0, 1.0), naive(1.0, 0.0, 1.0), 1e-12));
  SUBCASE("agrees with the naive form on [1e-3, 30]") {
    for (double x = 1e-3; x <= 30.0; x *= 1.37) {
      for (auto [a, b] : {std::pair{1.0, 0.5}, std::pair{2.0, -1.0}, std::pair{0.0, 1.0}}) {
        const double n = naive(a, b, x);
        // The naive form loses about e^{2x} eps of absolute accuracy.
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::exp(2.0 * x) *
                             (std::abs(a) + std::abs(b));
        CHECK(std::abs(stable_shi_chi_combo(a, b, x) - n) <= std::max(1e-9 * std::abs(n), slack));
      }
    }
  }
  SUBCASE("large argument against 240-digit evaluation") {
    for (double x : {30.0, 100.0, 200.0}) {
      const Big bx(x);
      const Big s = big_shi(bx), c = big_chi(bx);
      const Big ch = boost::multiprecision::cosh(bx), sh = boost::multiprecision::sinh(bx);
      const double want = static_cast<double>((s * ch - c * sh) + Big(0.5) * (s * sh - c * ch));
      const double got = stable_shi_chi_combo(1.0, 0.5, x);
      CHECK(std::isfinite(got));
      INFO("x = ", x, " got ", got, " want ", want);
      CHECK(close_rel(got, want, 1e-12));
    }
    CHECK(close_rel(stable_shi_chi_combo(1.0, 0.5, 500.0), 0.001998015952764251535345399, 1e-12));
    CHECK(std::isfinite(stable_shi_chi_combo(1.0, 0.5, 700.0)));
  }
}
