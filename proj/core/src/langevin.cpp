#include "abh/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "abh/error.hpp"
#include "abh/params.hpp"

namespace abh {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform in [0, 1).
inline double to_unit(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
  return static_cast<double>(bits) * 0x1.0p-53;
}

std::vector<double> velocities(const std::vector<double>& x, const VelocityField& v, double t) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = v(x[i], t);
  return out;
}

double l2_norm(const LatticeState& s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.field.size(); ++i) {
    sum += s.field[i] * s.field[i] + s.momentum[i] * s.momentum[i];
  }
  return std::sqrt(sum * s.spacing);
}

VelocityField from_profile(const LineProfile& profile) {
  return [&profile](double x, double t) { return profile.velocity(x, t); };
}

// Wave system right-hand side with centered second-order differences.
void wave_rhs(const std::vector<double>& phi, const std::vector<double>& pi,
              const std::vector<double>& v, double h, std::vector<double>& dphi,
              std::vector<double>& dpi) {
  const std::size_t n = phi.size();
  const double inv2h = 0.5 / h, invh2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
    dphi[i] = pi[i] - v[i] * (phi[ip] - phi[im]) * inv2h;
    dpi[i] = -(v[ip] * pi[ip] - v[im] * pi[im]) * inv2h + (phi[ip] - 2.0 * phi[i] + phi[im]) * invh2;
  }
}

// Fourth-order periodic first derivative.
inline double d4(const double* f, std::size_t i, std::size_t n, double inv12h) {
  const std::size_t ip1 = (i + 1) % n, ip2 = (i + 2) % n;
  const std::size_t im1 = (i + n - 1) % n, im2 = (i + n - 2) % n;
  return (8.0 * (f[ip1] - f[im1]) - (f[ip2] - f[im2])) * inv12h;
}

// Third-order upwind-biased a * d_x f; the stencil leans against the flow.
inline double upwind_flux(const double* f, std::size_t i, std::size_t n, double a, double inv6h) {
  const std::size_t ip1 = (i + 1) % n, ip2 = (i + 2) % n;
  const std::size_t im1 = (i + n - 1) % n, im2 = (i + n - 2) % n;
  if (a > 0) return a * (2.0 * f[ip1] + 3.0 * f[i] - 6.0 * f[im1] + f[im2]) * inv6h;
  return a * (-f[ip2] + 6.0 * f[ip1] - 3.0 * f[i] - 2.0 * f[im1]) * inv6h;
}

// Sub-pixel argmax of |values| by a parabola through the maximum and its neighbours.
double refined_argmax(const std::vector<double>& xs, const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (std::abs(values[i]) > std::abs(values[best])) best = i;
  }
  if (best == 0 || best + 1 == values.size()) return xs[best];
  const double ym = std::abs(values[best - 1]), y0 = std::abs(values[best]),
               yp = std::abs(values[best + 1]);
  const double denom = ym - 2.0 * y0 + yp;
  if (denom >= 0.0) return xs[best];
  const double offset = 0.5 * (ym - yp) / denom;
  return xs[best] + offset * (xs[best + 1] - xs[best]);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

std::array<double, 2> gaussian_pair(std::uint64_t seed, std::uint64_t realization,
                                    std::uint64_t step, std::uint64_t site) {
  if (step > 0xFFFFFFFFull || site > 0xFFFFFFFFull) {
    throw ConfigError("random stream: step and site indices must fit in 32 bits");
  }
  const auto r = philox4x32(
      {static_cast<std::uint32_t>(site), static_cast<std::uint32_t>(step),
       static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(realization >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const double u1 = 1.0 - to_unit(r[0], r[1]);  // (0, 1]
  const double u2 = to_unit(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return {radius * std::cos(kTwoPi * u2), radius * std::sin(kTwoPi * u2)};
}

LatticeState make_lattice(int n, double length, double origin, std::uint64_t seed,
                          std::uint64_t realization) {
  if (n < 5) throw ConfigError("lattice needs at least 5 sites");
  if (!(length > 0)) throw ConfigError("lattice length must be > 0");
  LatticeState s;
  s.spacing = length / n;
  s.x.resize(n);
  for (int i = 0; i < n; ++i) s.x[i] = origin + s.spacing * i;
  s.field.assign(n, 0.0);
  s.momentum.assign(n, 0.0);
  s.seed = seed;
  s.realization_id = realization;
  return s;
}

double max_stable_dt(const LatticeState& state, const VelocityField& velocity) {
  double worst = 0.0;
  for (double x : state.x) worst = std::max(worst, 1.0 + std::abs(velocity(x, state.time)));
  return 0.5 * state.spacing / worst;
}

double max_stable_dt(const LatticeState& state, const LineProfile& profile) {
  return max_stable_dt(state, from_profile(profile));
}

double noise_increment_variance(double dt, double spacing, const EnvironmentSpec& env) {
  if (env.coupling_eff == 0.0) return 0.0;
  return env.hbar * noise_kernel(0.0, env) * dt / spacing;
}

std::vector<double> sample_noise(const LatticeState& state, double dt, const EnvironmentSpec& env) {
  const double sd = std::sqrt(noise_increment_variance(dt, state.spacing, env));
  std::vector<double> out(state.x.size(), 0.0);
  if (sd == 0.0) return out;
  // One Philox call feeds two sites.
  for (std::size_t i = 0; i < out.size(); i += 2) {
    const auto g = gaussian_pair(state.seed, state.realization_id, state.step_index + 1, i / 2);
    out[i] = sd * g[0];
    if (i + 1 < out.size()) out[i + 1] = sd * g[1];
  }
  return out;
}

void step(LatticeState& state, double dt, const VelocityField& velocity, const EnvironmentSpec& env) {
  if (!(dt > 0)) throw ConfigError("time step must be > 0");
  const double bound = max_stable_dt(state, velocity);
  const double later = [&] {
    LatticeState probe;
    probe.x = state.x;
    probe.spacing = state.spacing;
    probe.time = state.time + dt;
    return max_stable_dt(probe, velocity);
  }();
  if (dt > std::min(bound, later) * (1.0 + 1e-12)) {
    throw ConfigError("time step " + std::to_string(dt) + " exceeds the stability bound " +
                      std::to_string(std::min(bound, later)));
  }
  const std::size_t n = state.x.size();
  const double h = state.spacing;
  if (state.step_index == 0 && state.reference_norm == 0.0) state.reference_norm = l2_norm(state);

  const auto v0 = velocities(state.x, velocity, state.time);
  const auto vh = velocities(state.x, velocity, state.time + 0.5 * dt);
  const auto v1 = velocities(state.x, velocity, state.time + dt);

  std::vector<double> k1f(n), k1p(n), k2f(n), k2p(n), k3f(n), k3p(n), k4f(n), k4p(n);
  std::vector<double> tf(n), tp(n);
  const auto& phi = state.field;
  const auto& pi = state.momentum;
  wave_rhs(phi, pi, v0, h, k1f, k1p);
  for (std::size_t i = 0; i < n; ++i) {
    tf[i] = phi[i] + 0.5 * dt * k1f[i];
    tp[i] = pi[i] + 0.5 * dt * k1p[i];
  }
  wave_rhs(tf, tp, vh, h, k2f, k2p);
  for (std::size_t i = 0; i < n; ++i) {
    tf[i] = phi[i] + 0.5 * dt * k2f[i];
    tp[i] = pi[i] + 0.5 * dt * k2p[i];
  }
  wave_rhs(tf, tp, vh, h, k3f, k3p);
  for (std::size_t i = 0; i < n; ++i) {
    tf[i] = phi[i] + dt * k3f[i];
    tp[i] = pi[i] + dt * k3p[i];
  }
  wave_rhs(tf, tp, v1, h, k4f, k4p);
  for (std::size_t i = 0; i < n; ++i) {
    state.field[i] += dt / 6.0 * (k1f[i] + 2.0 * k2f[i] + 2.0 * k3f[i] + k4f[i]);
    state.momentum[i] += dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
  }

  if (env.coupling_eff > 0.0) {
    const double damping = std::exp(-env.coupling_eff * env.coupling_eff * dt);
    const auto kicks = sample_noise(state, dt, env);
    for (std::size_t i = 0; i < n; ++i) state.momentum[i] = damping * state.momentum[i] + kicks[i];
  }

  state.time += dt;
  ++state.step_index;

  const double norm = l2_norm(state);
  const double limit = 1e8 * std::max(state.reference_norm, 1.0);
  if (!std::isfinite(norm) || norm > limit) {
    throw NumericError("lattice instability at step " + std::to_string(state.step_index) +
                       " (t = " + std::to_string(state.time) + "): field norm " +
                       std::to_string(norm) + " exceeds " + std::to_string(limit));
  }
}

void step(LatticeState& state, double dt, const LineProfile& profile, const EnvironmentSpec& env) {
  step(state, dt, from_profile(profile), env);
}

double lattice_energy(const LatticeState& state) {
  const std::size_t n = state.field.size();
  const double h = state.spacing;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double grad = (state.field[(i + 1) % n] - state.field[i]) / h;
    sum += state.momentum[i] * state.momentum[i] + grad * grad;
  }
  return 0.5 * h * sum;
}

namespace {

struct Transport {
  const LineProfile& profile;
  const std::vector<double>& x;
  double h;
  int steps;
  double dt;
  double relax;    // per-step factor, 1 without coupling
  double kick_sd;  // per-site kick, 0 without coupling
  std::uint64_t seed;

  // Advances `count` contiguous fields by d_t phi = -(v - 1) d_x phi; ids key the noise.
  void run(std::vector<double>& fields, int count, std::uint64_t first_id) const {
    const int n = static_cast<int>(x.size());
    const double inv6h = 1.0 / (6.0 * h);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), a0(n), ah(n), a1(n);
    for (int s = 0; s < steps; ++s) {
      const double t0 = s * dt;
      for (int i = 0; i < n; ++i) {
        a0[i] = profile.velocity(x[i], t0) - 1.0;
        ah[i] = profile.velocity(x[i], t0 + 0.5 * dt) - 1.0;
        a1[i] = profile.velocity(x[i], t0 + dt) - 1.0;
      }
      for (int r = 0; r < count; ++r) {
        double* phi = fields.data() + static_cast<std::size_t>(r) * n;
        for (int i = 0; i < n; ++i) k1[i] = -upwind_flux(phi, i, n, a0[i], inv6h);
        for (int i = 0; i < n; ++i) tmp[i] = phi[i] + 0.5 * dt * k1[i];
        for (int i = 0; i < n; ++i) k2[i] = -upwind_flux(tmp.data(), i, n, ah[i], inv6h);
        for (int i = 0; i < n; ++i) tmp[i] = phi[i] + 0.5 * dt * k2[i];
        for (int i = 0; i < n; ++i) k3[i] = -upwind_flux(tmp.data(), i, n, ah[i], inv6h);
        for (int i = 0; i < n; ++i) tmp[i] = phi[i] + dt * k3[i];
        for (int i = 0; i < n; ++i) k4[i] = -upwind_flux(tmp.data(), i, n, a1[i], inv6h);
        for (int i = 0; i < n; ++i) phi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (kick_sd > 0.0) {
          const std::uint64_t id = first_id + static_cast<std::uint64_t>(r);
          for (int i = 0; i < n; i += 2) {
            const auto g = gaussian_pair(seed, id, static_cast<std::uint64_t>(s) + 1, i / 2);
            phi[i] = relax * phi[i] + kick_sd * g[0];
            if (i + 1 < n) phi[i + 1] = relax * phi[i + 1] + kick_sd * g[1];
          }
        }
      }
    }
  }
};

}  // namespace

MonteCarloResult estimate_correlation(const EnsembleConfig& config, double x1, double x2_min,
                                      double x2_max, double t, double temperature,
                                      const LineProfile& profile, const EnvironmentSpec& env) {
  if (config.realizations < 2 || config.batches < 2) {
    throw ConfigError("ensemble needs at least 2 realizations and 2 batches");
  }
  if (config.realizations % config.batches != 0) {
    throw ConfigError("realizations must be a multiple of batches");
  }
  if (!(t >= 0)) throw ConfigError("time must be >= 0");
  if (!(temperature >= 0)) throw ConfigError("temperature must be >= 0");
  if (!(config.cutoff_k > 0)) throw ConfigError("cutoff_k must be > 0");
  validate(env);

  const int n = config.sites;
  const double origin = -0.5 * config.length;
  const LatticeState grid = make_lattice(n, config.length, origin);
  const double h = grid.spacing;
  auto site_of = [&](double x) {
    const double r = std::round((x - origin) / h);
    if (r < 0 || r >= n) throw ConfigError("probe position outside the lattice");
    return static_cast<std::size_t>(r);
  };
  // Probe first, then the x2 window.
  std::vector<std::size_t> sites{site_of(x1)};
  for (int i = 0; i < n; ++i) {
    if (grid.x[i] >= x2_min - 1e-12 && grid.x[i] <= x2_max + 1e-12) sites.push_back(i);
  }
  const std::size_t nt = sites.size() - 1;
  if (nt < 3) throw ConfigError("x2 window covers fewer than 3 lattice sites");

  double max_speed = 0.0;
  for (double x : grid.x) max_speed = std::max(max_speed, std::abs(profile.shape(x)) + 1.0);
  const double dt_bound = 0.5 * h / max_speed;
  if (config.dt > dt_bound * (1.0 + 1e-12)) {
    throw ConfigError("ensemble dt exceeds the stability bound " + std::to_string(dt_bound));
  }
  const int steps = t > 0 ? static_cast<int>(std::ceil(t / config.dt - 1e-9)) : 0;
  const double dt = steps > 0 ? t / steps : 0.0;
  const bool coupled = env.coupling_eff > 0.0;
  const Transport transport{
      profile, grid.x, h, steps, dt,
      coupled ? std::exp(-0.5 * env.coupling_eff * env.coupling_eff * dt) : 1.0,
      coupled ? std::sqrt(0.5 * noise_increment_variance(dt, h, env)) : 0.0, config.seed};

  // Initial spectrum on the periodic box.
  const double dk = kTwoPi / config.length;
  const int modes = std::min(static_cast<int>(5.0 * config.cutoff_k / dk), n / 2 - 1);
  std::vector<double> amp(modes);
  for (int m = 0; m < modes; ++m) {
    const double k = dk * (m + 1);
    const double occupation = temperature > 0 ? 1.0 / std::tanh(0.5 * k / temperature) : 1.0;
    amp[m] = std::sqrt(dk * occupation / k * std::exp(-std::pow(k / config.cutoff_k, 2)));
  }
  auto basis = [&](int m, bool sine, int i) {
    const double arg = dk * (m + 1) * (grid.x[i] - origin);
    return sine ? std::sin(arg) : std::cos(arg);
  };
  const double inv12h = 1.0 / (12.0 * h);

  const int per_batch = config.realizations / config.batches;
  std::vector<std::vector<double>> batch_means(config.batches, std::vector<double>(nt, 0.0));

  if (!coupled) {
    // Linear transport: propagate each unit mode once; realizations are Gaussian
    // superpositions of the propagated modes.
    std::vector<double> fields(static_cast<std::size_t>(2 * modes) * n);
    for (int m = 0; m < modes; ++m) {
      for (int i = 0; i < n; ++i) {
        fields[static_cast<std::size_t>(2 * m) * n + i] = amp[m] * basis(m, false, i);
        fields[static_cast<std::size_t>(2 * m + 1) * n + i] = amp[m] * basis(m, true, i);
      }
    }
    transport.run(fields, 2 * modes, 0);
    std::vector<double> response(static_cast<std::size_t>(2 * modes) * sites.size());
    for (int f = 0; f < 2 * modes; ++f) {
      const double* phi = fields.data() + static_cast<std::size_t>(f) * n;
      for (std::size_t j = 0; j < sites.size(); ++j) {
        response[static_cast<std::size_t>(f) * sites.size() + j] = d4(phi, sites[j], n, inv12h);
      }
    }
    std::vector<double> pi(sites.size());
    for (int b = 0; b < config.batches; ++b) {
      auto& mean = batch_means[b];
      for (int r = 0; r < per_batch; ++r) {
        const std::uint64_t id = static_cast<std::uint64_t>(b) * per_batch + r;
        std::fill(pi.begin(), pi.end(), 0.0);
        for (int m = 0; m < modes; ++m) {
          const auto g = gaussian_pair(config.seed, id, 0, m);
          const double* rc = response.data() + static_cast<std::size_t>(2 * m) * sites.size();
          const double* rs = rc + sites.size();
          for (std::size_t j = 0; j < sites.size(); ++j) pi[j] += g[0] * rc[j] + g[1] * rs[j];
        }
        for (std::size_t j = 0; j < nt; ++j) mean[j] += pi[0] * pi[j + 1];
      }
      for (double& v : mean) v /= per_batch;
    }
  } else {
    std::vector<double> fields(static_cast<std::size_t>(per_batch) * n);
    for (int b = 0; b < config.batches; ++b) {
      const std::uint64_t first = static_cast<std::uint64_t>(b) * per_batch;
      std::fill(fields.begin(), fields.end(), 0.0);
      for (int r = 0; r < per_batch; ++r) {
        double* phi = fields.data() + static_cast<std::size_t>(r) * n;
        for (int m = 0; m < modes; ++m) {
          const auto g = gaussian_pair(config.seed, first + r, 0, m);
          for (int i = 0; i < n; ++i) {
            phi[i] += amp[m] * (g[0] * basis(m, false, i) + g[1] * basis(m, true, i));
          }
        }
      }
      transport.run(fields, per_batch, first);
      auto& mean = batch_means[b];
      for (int r = 0; r < per_batch; ++r) {
        const double* phi = fields.data() + static_cast<std::size_t>(r) * n;
        const double p1 = d4(phi, sites[0], n, inv12h);
        for (std::size_t j = 0; j < nt; ++j) mean[j] += p1 * d4(phi, sites[j + 1], n, inv12h);
      }
      for (double& v : mean) v /= per_batch;
    }
  }
  for (const auto& mean : batch_means) {
    for (double v : mean) {
      if (!std::isfinite(v)) throw NumericError("left-mover transport produced a non-finite field");
    }
  }

  MonteCarloResult out;
  out.realizations = config.realizations;
  out.x1_site = grid.x[sites[0]];
  out.discretization_error = h;
  out.grid.t = t;
  out.grid.x1 = out.x1_site;
  out.grid.temperature = temperature;
  out.grid.method = CorrelationMethod::monte_carlo;
  std::vector<double> xs(nt), overall(nt);
  const double nb = config.batches;
  for (std::size_t j = 0; j < nt; ++j) {
    xs[j] = grid.x[sites[j + 1]];
    double sum = 0.0;
    for (const auto& m : batch_means) sum += m[j];
    const double avg = sum / nb;
    double var = 0.0;
    for (const auto& m : batch_means) var += (m[j] - avg) * (m[j] - avg);
    overall[j] = avg;
    out.grid.samples.push_back({xs[j], avg, std::sqrt(var / (nb - 1.0) / nb)});
  }
  out.peak_location = refined_argmax(xs, overall);
  double pk_mean = 0.0;
  for (const auto& m : batch_means) {
    out.batch_peaks.push_back(refined_argmax(xs, m));
    pk_mean += out.batch_peaks.back();
  }
  pk_mean /= nb;
  double pk_var = 0.0;
  for (double p : out.batch_peaks) pk_var += (p - pk_mean) * (p - pk_mean);
  out.peak_stat_error = std::sqrt(pk_var / (nb - 1.0) / nb);
  out.target_met = !(config.target_peak_error > 0) || out.peak_stat_error <= config.target_peak_error;
  return out;
}

}  // namespace abh
