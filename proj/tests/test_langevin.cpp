#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "abh/correlations.hpp"
#include "abh/environment.hpp"
#include "abh/error.hpp"
#include "abh/langevin.hpp"
#include "abh/profile.hpp"

using namespace abh;

namespace {

EnvironmentSpec coupled_bath(double g = 0.05) {
  EnvironmentSpec e;
  e.coupling_eff = g;
  e.cutoff = 10.0;
  e.cutoff_shape = CutoffShape::exponential;
  return e;
}

VelocityField constant_flow(double v) {
  return [v](double, double) { return v; };
}

// Right-moving wave phi = sin(q (x - (1 + v) t)); Pi = d_t phi + v d_x phi = -q cos(...).
void load_wave(LatticeState& s, double q, double v, double t) {
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const double arg = q * (s.x[i] - (1.0 + v) * t);
    s.field[i] = std::sin(arg);
    s.momentum[i] = -q * std::cos(arg);
  }
}

double wave_error(int n) {
  const double length = 20.0, v = 0.3, q = kTwoPi / length * 2, t_end = 4.0;
  auto s = make_lattice(n, length, 0.0);
  load_wave(s, q, v, 0.0);
  const auto flow = constant_flow(v);
  const double dt_max = max_stable_dt(s, flow);
  const int steps = static_cast<int>(std::ceil(t_end / (0.25 * dt_max)));
  const double dt = t_end / steps;
  for (int i = 0; i < steps; ++i) step(s, dt, flow, EnvironmentSpec{});
  auto exact = make_lattice(n, length, 0.0);
  load_wave(exact, q, v, t_end);
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(s.field[i] - exact.field[i]));
  return err;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("Gaussian stream statistics") {
  std::vector<double> z;
  for (std::uint64_t i = 0; i < 50000; ++i) {
    const auto g = gaussian_pair(11, 3, i / 100, i % 100);
    z.push_back(g[0]);
    z.push_back(g[1]);
  }
  const double n = static_cast<double>(z.size());
  const double m = mean(z);
  double var = 0.0, kurt = 0.0;
  for (double x : z) {
    var += (x - m) * (x - m);
    kurt += std::pow(x - m, 4);
  }
  var /= n;
  kurt /= n * var * var;
  CHECK(std::abs(m) < 4.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(kurt - 3.0) < 4.0 * std::sqrt(24.0 / n));
  CHECK(gaussian_pair(11, 3, 7, 5) == gaussian_pair(11, 3, 7, 5));
  CHECK(gaussian_pair(11, 3, 7, 5) != gaussian_pair(12, 3, 7, 5));
}

TEST_CASE("free-field energy is conserved on a flat background") {
  auto s = make_lattice(512, 51.2, -25.6);
  for (std::size_t i = 0; i < s.x.size(); ++i) s.field[i] = std::exp(-std::pow(s.x[i] / 3.0, 2));
  const auto flow = constant_flow(0.0);
  const double e0 = lattice_energy(s);
  const double dt = 0.25 * max_stable_dt(s, flow);
  for (int i = 0; i < 10000; ++i) step(s, dt, flow, EnvironmentSpec{});
  CHECK(std::abs(lattice_energy(s) / e0 - 1.0) < 1e-6);
}

TEST_CASE("plane wave translates at 1 + v with second-order error") {
  const double e1 = wave_error(128), e2 = wave_error(256);
  CHECK(e1 < 0.05);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("stability bound and blow-up detection") {
  auto s = make_lattice(64, 6.4, 0.0);
  const auto flow = constant_flow(0.5);
  CHECK(max_stable_dt(s, flow) == doctest::Approx(0.5 * 0.1 / 1.5).epsilon(1e-14));
  CHECK_THROWS_AS(step(s, 2.0 * max_stable_dt(s, flow), flow, EnvironmentSpec{}), ConfigError);
  const LineProfile line(0.9, 1.1, 1.0, 1.0);
  auto l = make_lattice(64, 6.4, -3.2);
  CHECK(max_stable_dt(l, line) > 0);
}

TEST_CASE("noise injection") {
  const auto env = coupled_bath();
  auto s = make_lattice(1000, 100.0, 0.0, 99, 4);
  const double dt = 0.01;
  const double want = noise_increment_variance(dt, s.spacing, env);
  CHECK(want == doctest::Approx(env.hbar * noise_kernel(0.0, env) * dt / s.spacing).epsilon(1e-12));
  CHECK(noise_increment_variance(dt, s.spacing, EnvironmentSpec{}) == 0.0);

  std::vector<double> all;
  double lag_sum = 0.0;
  std::size_t lag_n = 0;
  for (int k = 0; k < 10; ++k) {
    s.step_index = static_cast<std::uint64_t>(k);
    const auto xi = sample_noise(s, dt, env);
    for (std::size_t i = 0; i + 1 < xi.size(); ++i) {
      lag_sum += xi[i] * xi[i + 1];
      ++lag_n;
    }
    all.insert(all.end(), xi.begin(), xi.end());
  }
  REQUIRE(all.size() == 10000);
  double var = 0.0;
  for (double x : all) var += x * x;
  var /= all.size();
  const double sigma = want * std::sqrt(2.0 / all.size());
  CHECK(std::abs(var - want) < 3.0 * sigma);
  const double rho = lag_sum / lag_n / var;
  CHECK(std::abs(rho) < 3.0 / std::sqrt(static_cast<double>(lag_n)));
}

TEST_CASE("identical seeds give bit-identical trajectories") {
  const LineProfile line(0.9, 1.1, 1.0, 1.0);
  const auto env = coupled_bath();
  auto run = [&](std::uint64_t seed) {
    auto s = make_lattice(128, 12.8, -6.4, seed, 2);
    for (std::size_t i = 0; i < s.x.size(); ++i) s.field[i] = std::exp(-s.x[i] * s.x[i]);
    const double dt = 0.2 * s.spacing;  // below 0.5 h / (1 + v_max) at all times
    for (int i = 0; i < 200; ++i) step(s, dt, line, env);
    return s;
  };
  const auto a = run(5), b = run(5), c = run(6);
  CHECK(a.field == b.field);
  CHECK(a.momentum == b.momentum);
  CHECK(a.field != c.field);
}

TEST_CASE("results do not depend on the lattice labelling") {
  const int n = 128, shift = 37;
  const double length = 12.8;
  // Smooth periodic flow so both labellings see the same velocities.
  const VelocityField flow = [&](double x, double) { return 0.3 * std::sin(kTwoPi * x / length); };
  auto a = make_lattice(n, length, 0.0);
  auto b = make_lattice(n, length, 0.0);
  for (int i = 0; i < n; ++i) a.field[i] = std::exp(-std::pow(a.x[i] - 4.0, 2));
  for (int i = 0; i < n; ++i) b.field[i] = a.field[(i + shift) % n];
  // b's site i sits at a's position x[i + shift].
  for (int i = 0; i < n; ++i) b.x[i] = a.x[(i + shift) % n];
  const double dt = 0.5 * max_stable_dt(a, flow);
  for (int k = 0; k < 300; ++k) {
    step(a, dt, flow, EnvironmentSpec{});
    step(b, dt, flow, EnvironmentSpec{});
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(b.field[i] - a.field[(i + shift) % n]));
  CHECK(worst < 1e-12);
}

TEST_CASE("Monte-Carlo variance halves when realizations double") {
  const LineProfile line(0.9, 1.1, 1.0, 1.0);
  EnsembleConfig cfg;
  cfg.sites = 128;
  cfg.length = 12.8;
  cfg.dt = 0.02;
  cfg.cutoff_k = 4.0;
  cfg.batches = 500;
  auto variance = [&](int realizations) {
    cfg.realizations = realizations;
    const auto r = estimate_correlation(cfg, -1.0, 0.5, 3.0, 1.0, 0.0, line, EnvironmentSpec{});
    double v = 0.0;
    for (const auto& s : r.grid.samples) v += s.std_error * s.std_error;
    return v / r.grid.samples.size();
  };
  const double ratio = variance(5000) / variance(10000);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("ensemble rejects invalid configurations") {
  const LineProfile line(0.9, 1.1, 1.0, 1.0);
  EnsembleConfig cfg;
  cfg.sites = 64;
  cfg.length = 6.4;
  cfg.realizations = 10;
  cfg.batches = 3;
  CHECK_THROWS_AS(estimate_correlation(cfg, -1.0, 0.5, 2.0, 1.0, 0.0, line, EnvironmentSpec{}), ConfigError);
  cfg.batches = 2;
  cfg.dt = 1.0;
  CHECK_THROWS_AS(estimate_correlation(cfg, -1.0, 0.5, 2.0, 1.0, 0.0, line, EnvironmentSpec{}), ConfigError);
}

TEST_CASE("thermal initial data dilutes the Monte-Carlo peak") {
  // Reduced line geometry. The window [a, 6] reaches past x+(t) ~ 4 so the
  // background includes the thermal tail; the peak region is excluded from it.
  const LineProfile line(0.9, 1.1, 1.0, 0.025);
  EnsembleConfig cfg;
  cfg.sites = 512;
  cfg.length = 12.8;
  cfg.dt = 0.005;
  cfg.realizations = 10000;
  cfg.batches = 10;
  cfg.cutoff_k = 10.0;
  const double th = hawking_temperature_line(1.1, 0.9, 1.0);
  PeakOptions opt;
  opt.exclusion_half_width = 2.0;
  opt.threshold = 1.5;
  auto contrast = [&](double temperature) {
    const auto r = estimate_correlation(cfg, -2.4, 1.0, 6.0, 30.0, temperature, line, EnvironmentSpec{});
    return detect_peak(r.grid, opt).contrast;
  };
  const double cold = contrast(0.0), hot = contrast(60.0 * th);
  MESSAGE("contrast T0=0: ", cold, "  T0=60 T_H: ", hot);
  CHECK(hot < cold);
}
