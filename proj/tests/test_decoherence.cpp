#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "abh/decoherence.hpp"
#include "abh/environment.hpp"
#include "abh/error.hpp"
#include "abh/params.hpp"
#include "abh/profile.hpp"
#include "abh/specfun.hpp"

using namespace abh;

namespace {

EnvironmentSpec lorentz(double cutoff, double g = 1.0) {
  EnvironmentSpec s;
  s.coupling_eff = g;
  s.cutoff = cutoff;
  s.cutoff_shape = CutoffShape::lorentzian;
  return s;
}

bool close_rel(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::abs(want);
}

struct GridPoint {
  double t, omega, cutoff, value;
};

// mpmath closed form with working precision scaled to Lambda t (cancellation of
// e^{2 Lambda t}); cross-checked against direct oscillatory quadrature where it converges.
const GridPoint kGrid[] = {
    {1, 10, 1000, 7.871416945901831},      {1, 0.1, 1000, 0.50250029069382873},
    {10, 10, 1, 0.078045364634741156},     {1, 1, 10, 0.73763833168724955},
    {10, 0.1, 10, 0.074313037149891124},   {0.01, 10, 1, 0.025103933164449292},
    {0.01, 10, 10, 1.363928622528693},     {10, 10, 10, 3.9272526233313929},
    {0.1, 10, 10, 3.1327696992297204},     {0.1, 100, 1000, 77.944459133667839},
    {0.01, 10, 1000, 51.411108090974509},  {1, 10, 100, 7.7944459133667838},
    {0.1, 1, 1, 0.1363928622528693},       {1, 0.1, 1, 0.32327780169342657},
    {1, 100, 10, 0.78045364634741156},     {10, 100, 10, 0.77758063167811109},
    {1, 1, 100, 0.74313037149891122},      {0.1, 0.1, 100, 5.1179924579174179},
    {10, 10, 100, 7.776481085283153},      {0.01, 100, 100, 31.327696992297204},
};

PhysicalConfig ring() { return load_config(default_config_text()); }

}  // namespace

TEST_CASE("exact normal diffusion") {
  CHECK(diffusion_exact(0.0, 2.0, lorentz(20)) == 0.0);
  SUBCASE("20-point grid over three decades") {
    for (const auto& p : kGrid) {
      INFO("t=", p.t, " omega=", p.omega, " Lambda=", p.cutoff);
      CHECK(close_rel(diffusion_exact(p.t, p.omega, lorentz(p.cutoff)), p.value, 1e-6));
    }
  }
  SUBCASE("agrees with the nested quadrature") {
    CHECK(close_rel(diffusion_exact(3, 2, lorentz(20)), diffusion_oracle(3, 2, lorentz(20)), 1e-6));
    CHECK(close_rel(diffusion_exact(3, 2, lorentz(20)), 1.56919097168843278619742856829, 1e-6));
  }
  SUBCASE("long-time plateau") {
    for (double omega : {0.01, 0.05}) {
      const auto e = lorentz(10.0, 0.7);
      const double t = 250.0 / omega;
      CHECK(std::abs(diffusion_exact(t, omega, e) / diffusion_asymptotic(omega, e) - 1.0) < 0.02);
    }
    CHECK(diffusion_asymptotic(2.0, lorentz(5, 0.5)) == doctest::Approx(0.25 * 2.0 * kPi / 4).epsilon(1e-15));
  }
  SUBCASE("unsupported inputs") {
    auto e = lorentz(10);
    e.cutoff_shape = CutoffShape::exponential;
    CHECK_THROWS_AS(diffusion_exact(1.0, 1.0, e), NumericError);
    e = lorentz(10);
    e.bath_temperature = 0.1;
    CHECK_THROWS_AS(diffusion_exact(1.0, 1.0, e), RegimeError);
  }
}

TEST_CASE("finite-temperature diffusion") {
  const auto e = lorentz(1e6);
  CHECK(diffusion_thermal(2.0, 3.0, std::numeric_limits<double>::infinity(), e) == doctest::Approx(0.5 * 3.0 * si(6.0)).epsilon(1e-15));
  for (double beta : {10.0, 50.0, std::numeric_limits<double>::infinity()}) CHECK(diffusion_thermal(0.0, 3.0, beta, e) == 0.0);
  CHECK_THROWS(diffusion_thermal(1.0, 1.0, 0.0, e));
  CHECK_THROWS(diffusion_thermal(1.0, 1.0, -2.0, e));
  // (t, omega, beta) = (5, 3, 50): the sharp split reproduces the two-term expansion to O(beta^-3).
  const double t = 5, w = 3, b = 50;
  CHECK(std::abs(diffusion_thermal(t, w, b, e) - diffusion_thermal_split_oracle(t, w, b, e)) < 1.0 / (b * b * b));
  // Exact Bose weight, 30-digit quadrature. The expansion undershoots it by (pi^2/6 - 1) sin(wt)/(w b^2).
  const double full = 2.42743196603459244373175704614;
  CHECK(close_rel(diffusion_thermal_full_oracle(t, w, b, e), full, 1e-9));
  const double bose_term = 0.5 * (kPi * kPi / 3.0) * std::sin(w * t) / (w * b * b);
  CHECK(std::abs(0.5 * w * si(w * t) + bose_term - full) < 1.0 / (b * b * b));
}

TEST_CASE("anomalous diffusion") {
  SUBCASE("asymptote arithmetic") {
    const auto e = lorentz(100.0, 0.4);
    CHECK(anomalous_diffusion_asymptotic(1.0, 0.01, e).value ==
          doctest::Approx(0.5 * 0.16 * kPi * std::log(100.0)).epsilon(1e-14));
    const auto at_cutoff = anomalous_diffusion_asymptotic(100.0, 0.01, e);
    CHECK(at_cutoff.value == 0.0);
    CHECK_FALSE(at_cutoff.warning.empty());
    const double r = anomalous_diffusion_asymptotic(0.5, 0.01, e).value / anomalous_diffusion_asymptotic(1.0, 0.01, e).value;
    CHECK(r == doctest::Approx(0.5 * std::log(200.0) / std::log(100.0)).epsilon(1e-14));
  }
  SUBCASE("time-domain values against mpmath") {
    // f(t) = int_0^t N(s) sin(s) ds with the Lorentzian vacuum kernel in Ei/E1 form.
    CHECK(close_rel(diffusion(3.0, 1.0, lorentz(10), DiffusionMethod::exact, 0.1).anomalous,
                    -1.17632494837221708876172433541, 1e-9));
    CHECK(close_rel(diffusion(0.5, 1.0, lorentz(10), DiffusionMethod::exact, 0.1).anomalous,
                    -0.506527673013349847955548059034, 1e-9));
    CHECK(close_rel(anomalous_diffusion_oracle(0.5, 1.0, lorentz(10)), -0.506527673013349847955548059034, 1e-5));
  }
  SUBCASE("large-time limit") {
    const auto e = lorentz(100.0);
    CHECK(anomalous_diffusion_limit(1.0, e) == doctest::Approx(-std::log(100.0) / 2 / 1.0001).epsilon(1e-13));
    const double late = diffusion(60.0, 1.0, e, DiffusionMethod::exact, 0.01).anomalous;
    CHECK(std::abs(late - anomalous_diffusion_limit(1.0, e)) < 0.05 * std::abs(anomalous_diffusion_limit(1.0, e)));
  }
}

TEST_CASE("asymptotic method integrals grow linearly") {
  const auto e = lorentz(20.0, 0.3);
  double prev = -1.0;
  for (double t : {0.5, 1.0, 5.0, 20.0}) {
    const auto r = diffusion(t, 2.0, e, DiffusionMethod::asymptotic, 0.05);
    CHECK(r.normal_integral >= prev);
    CHECK(r.normal_integral == doctest::Approx(r.normal * t).epsilon(1e-14));
    prev = r.normal_integral;
  }
}

TEST_CASE("V coefficients") {
  const RingProfile rp(ring());
  const auto snap = rp.snapshot(RingProfile::kLate);
  const double delta = derive(ring()).delta;
  SUBCASE("zero frequency") {
    const auto vc = v_coefficients(snap, 0.0, delta);
    CHECK(vc.v1_u == doctest::Approx(kTwoPi).epsilon(1e-12));
    CHECK(vc.v1_v == doctest::Approx(kTwoPi).epsilon(1e-12));
    CHECK(std::abs(vc.v2_u) < 1e-12);
    CHECK(std::abs(vc.v2_v) < 1e-12);
  }
  SUBCASE("uniform flow has a closed form") {
    SpatialProfile p;
    const double c = 2.0, v = 0.5;
    p.velocity = [v](double) { return v; };
    p.sound_speed = [c](double) { return c; };
    for (double w : {0.7, 3.3, 12.0}) {
      const double k = w / (c + v);
      const double v1 = kPi + std::sin(2 * k * kTwoPi) / (4 * k);
      const double v2 = std::sin(k * kTwoPi) * std::sin(k * kTwoPi) / (2 * k);
      const auto vc = v_coefficients(p, w, 0.01);
      CHECK(vc.v1_u == doctest::Approx(v1).epsilon(1e-9));
      CHECK(vc.v2_u == doctest::Approx(v2).epsilon(1e-9));
    }
  }
  SUBCASE("bounds and the simplification regime over the allowed frequencies") {
    const auto tables = make_null_tables(snap, delta);
    const auto d = derive(ring());
    const auto omegas = allowed_frequencies(tables.u, d.omega_max);
    REQUIRE(omegas.size() > 10);
    CHECK(omegas.back() <= d.omega_max);
    for (double w : omegas) {
      const auto vc = v_coefficients(tables, snap, w);
      for (double v1 : {vc.v1_u, vc.v1_v}) CHECK((v1 >= 0 && v1 <= kTwoPi + 1e-12));
      for (double v2 : {vc.v2_u, vc.v2_v}) CHECK(std::abs(v2) <= kPi + 1e-12);
      CHECK(2 * std::log(1 / (w * d.tau)) * std::abs(vc.v2_u) < 0.05 * vc.v1_u);
      const double simple = spatial_factor(vc, NullBranch::u, d.tau, false);
      const double full = spatial_factor(vc, NullBranch::u, d.tau, true);
      CHECK(std::abs(full / simple - 1.0) < 0.05);
    }
  }
}

TEST_CASE("decoherence time formula") {
  const auto cfg = ring();
  const auto d = derive(cfg);
  DecoherenceInputs in{1e-8, 20.0, 0.0, kPi};
  const auto base = decoherence_time(cfg, d, in);
  CHECK(base.thermal_term == 0.0);
  CHECK(base.t_d == base.zero_temperature_term);
  const double expected =
      2 * cfg.hbar * cfg.hbar / (1e-16 * d.delta_v * d.delta * d.delta * 20.0 * kPi * d.rho * d.rho * kPi);
  CHECK(base.t_d == doctest::Approx(expected).epsilon(1e-14));

  auto doubled = in;
  doubled.gamma *= 2;
  CHECK(decoherence_time(cfg, d, doubled).t_d == doctest::Approx(base.t_d / 4).epsilon(1e-14));

  auto scaled = cfg;
  scaled.hbar *= 3;
  CHECK(decoherence_time(scaled, d, in).t_d == doctest::Approx(9 * base.t_d).epsilon(1e-14));
  auto dense = d;
  dense.rho *= 2;
  CHECK(decoherence_time(cfg, dense, in).t_d == doctest::Approx(base.t_d / 4).epsilon(1e-14));

  SUBCASE("quadratic temperature coefficient") {
    const double th = ring_hawking_temperature(cfg);
    REQUIRE(th > 0);
    // least squares of y = c T^2 over (0, 20 T_H]
    double num = 0, den = 0;
    for (int i = 1; i <= 20; ++i) {
      auto hot = in;
      hot.temperature = th * i;
      const double y = decoherence_time(cfg, d, hot).t_d - base.t_d;
      const double x2 = hot.temperature * hot.temperature;
      num += y * x2;
      den += x2 * x2;
    }
    const double want = -8 * cfg.k_boltzmann * cfg.k_boltzmann / (std::pow(20.0, 3) * kPi * cfg.hbar * cfg.hbar);
    CHECK(num / den == doctest::Approx(want).epsilon(0.01));
  }
  SUBCASE("non-positive time is a regime error") {
    auto hot = in;
    hot.temperature = 1e6;
    CHECK_THROWS_AS(decoherence_time(cfg, d, hot), RegimeError);
  }
}

TEST_CASE("decoherence sweeps") {
  const auto cfg = ring();
  SUBCASE("gamma axis follows the inverse-square law") {
    const std::vector<double> gs{1e-8, 1e-7, 1e-6, 1e-5};
    const auto rows = sweep_decoherence(SweepAxis::gamma, gs, cfg, {});
    REQUIRE(rows.size() == gs.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].error.empty());
      const double s = (gs[0] / gs[i]) * (gs[0] / gs[i]);
      CHECK(rows[i].t_d_min == doctest::Approx(rows[0].t_d_min * s).epsilon(1e-12));
      CHECK(rows[i].t_d_max == doctest::Approx(rows[0].t_d_max * s).epsilon(1e-12));
    }
  }
  SUBCASE("noise bound keeps t_D above 100 periods") {
    const auto rows = sweep_decoherence(SweepAxis::gamma, {3e-8}, cfg, {});
    CHECK(rows[0].t_d_min >= 100 * cfg.period);
  }
  SUBCASE("v_min axis is smooth") {
    std::vector<double> vs;
    for (int i = 0; i <= 8; ++i) vs.push_back((0.80 + 0.0075 * i) * kTwoPi);
    const auto rows = sweep_decoherence(SweepAxis::v_min, vs, cfg, {});
    int slope_changes = 0;
    for (std::size_t i = 2; i < rows.size(); ++i) {
      REQUIRE(rows[i].error.empty());
      const double a = rows[i - 1].t_d_min - rows[i - 2].t_d_min;
      const double b = rows[i].t_d_min - rows[i - 1].t_d_min;
      if (a * b < 0) ++slope_changes;
    }
    CHECK(slope_changes <= 1);
  }
  SUBCASE("points beyond 100 T_H are refused per row") {
    const double th = ring_hawking_temperature(cfg);
    const auto rows = sweep_decoherence(SweepAxis::temperature, {0.0, 10 * th, 200 * th}, cfg, {});
    CHECK(rows[0].error.empty());
    CHECK(rows[1].error.empty());
    CHECK_FALSE(rows[2].error.empty());
    CHECK(rows[1].t_d_min <= rows[0].t_d_min);
  }
  SUBCASE("sweep is independent of evaluation order") {
    const auto fwd = sweep_decoherence(SweepAxis::gamma, {1e-8, 2e-8}, cfg, {});
    const auto rev = sweep_decoherence(SweepAxis::gamma, {2e-8, 1e-8}, cfg, {});
    CHECK(fwd[0].t_d_min == rev[1].t_d_min);
    CHECK(fwd[1].t_d_max == rev[0].t_d_max);
  }
}
