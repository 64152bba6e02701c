#include "abh/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abh/error.hpp"
#include "abh/quadrature.hpp"
#include "abh/specfun.hpp"

namespace abh {
namespace {

enum class InnerTrig { cosine, sine };

// int_0^t w(s) cos(nu s) trig(omega s) ds with w = 1 or w = t - s.
double inner_integral(double nu, double t, double omega, InnerTrig trig, bool weighted) {
  const auto f = [&](double s) {
    const double w = weighted ? (t - s) : 1.0;
    const double g = trig == InnerTrig::cosine ? std::cos(omega * s) : std::sin(omega * s);
    return w * std::cos(nu * s) * g;
  };
  // Fixed rule, one piece per half period of the fastest component: smooth in nu,
  // so the outer integral sees no quadrature noise.
  const auto pieces = static_cast<std::size_t>(std::ceil(t * (nu + omega) / kPi)) + 1;
  return integrate_fixed(f, 0.0, t, pieces).value;
}

double bath_weight(double nu, const EnvironmentSpec& spec) {
  const double beta = spec.beta();
  const double base = nu * cutoff_function(nu, spec);
  if (std::isinf(beta)) return base;
  const double x = 0.5 * beta * spec.hbar * nu;
  if (x < 1e-8) return cutoff_function(nu, spec) * 2.0 / (beta * spec.hbar);
  return base / std::tanh(x);
}

// (g^2/2) int_0^inf dnu weight(nu) inner(nu).
double nested_oracle(double t, double omega, const EnvironmentSpec& spec, InnerTrig trig,
                     bool weighted) {
  validate(spec);
  if (!(t >= 0)) throw NumericError("time must be >= 0");
  if (t == 0.0) return 0.0;
  const auto g = [&](double nu) {
    return bath_weight(nu, spec) * inner_integral(nu, t, omega, trig, weighted);
  };
  QuadratureOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-11;
  o.max_intervals = 20000;
  const double half_period = kPi / t;
  // Do not test convergence before the resonance at nu = omega has been passed.
  const int min_segments = static_cast<int>(std::ceil(omega / half_period)) + 16;
  const double value = integrate_oscillatory(g, 0.0, half_period, o, 1000000, min_segments).value;
  return 0.5 * spec.coupling_eff * spec.coupling_eff * value;
}

// N(s) for a Lorentzian cutoff at zero temperature, s > 0:
// int_0^inf nu cos(nu s) / (nu^2 + L^2) dnu = -(e^{-Ls} Ei(Ls) - e^{Ls} E1(Ls)) / 2.
double lorentzian_vacuum_noise(double s, const EnvironmentSpec& spec) {
  const double lam = spec.cutoff;
  const double x = lam * s;
  return -0.25 * spec.coupling_eff * spec.coupling_eff * lam * lam * (scaled_ei(x) - scaled_e1(x));
}

// int_0^t w(s) N(s) sin(omega s) ds with the closed-form vacuum kernel.
double anomalous_from_kernel(double t, double omega, const EnvironmentSpec& spec, bool weighted) {
  if (t == 0.0) return 0.0;
  QuadratureOptions o;
  // The Ei/E1 difference cancels to ~2/x^2 at large cutoff * s.
  const double scale = 0.5 * spec.coupling_eff * spec.coupling_eff * omega *
                       (1.0 + std::abs(std::log(spec.cutoff / omega)));
  o.abs_tol = std::max(1e-12 * scale * (weighted ? t : 1.0), 1e-300);
  o.rel_tol = 1e-12;
  const auto f = [&](double s) {
    return (weighted ? t - s : 1.0) * lorentzian_vacuum_noise(s, spec) * std::sin(omega * s);
  };
  return integrate_piecewise(f, 0.0, t, kPi / omega, o).value;
}

void require_positive_omega(double omega) {
  if (!(omega > 0)) throw ConfigError("frequency omega must be > 0");
}

}  // namespace

const char* to_string(DiffusionMethod m) {
  switch (m) {
    case DiffusionMethod::exact: return "exact";
    case DiffusionMethod::asymptotic: return "asymptotic";
    case DiffusionMethod::thermal_expansion: return "thermal_expansion";
    case DiffusionMethod::quadrature_oracle: return "quadrature_oracle";
  }
  return "unknown";
}

double diffusion_exact(double t, double omega, const EnvironmentSpec& spec) {
  validate(spec);
  require_positive_omega(omega);
  if (spec.cutoff_shape != CutoffShape::lorentzian) {
    throw NumericError("closed-form D(t) exists for the Lorentzian cutoff only; use diffusion_oracle");
  }
  if (spec.bath_temperature > 0) {
    throw RegimeError("closed-form D(t) is the zero-temperature result; use diffusion_thermal");
  }
  if (!(t >= 0)) throw NumericError("time must be >= 0");
  if (t == 0.0) return 0.0;
  const double lam = spec.cutoff;
  const double r = omega / lam;
  const double combo =
      stable_shi_chi_combo((lam / omega) * std::cos(omega * t), std::sin(omega * t), lam * t);
  return 0.5 * spec.coupling_eff * spec.coupling_eff * omega / (1.0 + r * r) *
         (combo + si(omega * t));
}

double diffusion_oracle(double t, double omega, const EnvironmentSpec& spec) {
  require_positive_omega(omega);
  return nested_oracle(t, omega, spec, InnerTrig::cosine, false);
}

double diffusion_thermal(double t, double omega, double beta, const EnvironmentSpec& spec) {
  require_positive_omega(omega);
  if (!(beta > 0)) throw NumericError("inverse temperature beta must be > 0");
  const double g2 = spec.coupling_eff * spec.coupling_eff;
  double value = omega * si(omega * t);
  if (!std::isinf(beta)) {
    const double bh = beta * spec.hbar;
    value += 2.0 * std::sin(omega * t) / (omega * bh * bh);
  }
  return 0.5 * g2 * value;
}

double diffusion_thermal_split_oracle(double t, double omega, double beta,
                                      const EnvironmentSpec& spec) {
  require_positive_omega(omega);
  if (!(beta > 0)) throw NumericError("inverse temperature beta must be > 0");
  double value = omega * si(omega * t);
  if (!std::isinf(beta) && t > 0) {
    const double nu_c = 2.0 / (beta * spec.hbar);
    const auto f = [&](double nu) {
      return (nu_c - nu) * inner_integral(nu, t, omega, InnerTrig::cosine, false);
    };
    QuadratureOptions o;
    o.abs_tol = 1e-16;
    o.rel_tol = 1e-12;
    value += integrate_piecewise(f, 0.0, nu_c, kPi / t, o).value;
  }
  return 0.5 * spec.coupling_eff * spec.coupling_eff * value;
}

double diffusion_thermal_full_oracle(double t, double omega, double beta,
                                     const EnvironmentSpec& spec) {
  require_positive_omega(omega);
  if (!(beta > 0)) throw NumericError("inverse temperature beta must be > 0");
  double value = omega * si(omega * t);
  if (!std::isinf(beta) && t > 0) {
    const double bh = beta * spec.hbar;
    const auto f = [&](double nu) {
      const double x = bh * nu;
      const double bose = x < 1e-12 ? 1.0 / bh : nu / std::expm1(x);
      return 2.0 * bose * inner_integral(nu, t, omega, InnerTrig::cosine, false);
    };
    QuadratureOptions o;
    o.abs_tol = 1e-16;
    o.rel_tol = 1e-12;
    value += integrate_oscillatory(f, 0.0, kPi / t, o, 1000000).value;
  }
  return 0.5 * spec.coupling_eff * spec.coupling_eff * value;
}

double diffusion_asymptotic(double omega, const EnvironmentSpec& spec) {
  return spec.coupling_eff * spec.coupling_eff * omega * kPi / 4.0;
}

AnomalousAsymptote anomalous_diffusion_asymptotic(double omega, double tau,
                                                  const EnvironmentSpec& spec) {
  require_positive_omega(omega);
  if (!(tau > 0)) throw ConfigError("tau must be > 0");
  AnomalousAsymptote out;
  const double log_term = std::log(1.0 / (omega * tau));
  out.value = 0.5 * spec.coupling_eff * spec.coupling_eff * kPi * omega * log_term;
  if (omega * tau >= 1.0) {
    out.warning = "omega * tau = " + std::to_string(omega * tau) + " >= 1: logarithm is non-positive";
  }
  return out;
}

double anomalous_diffusion_oracle(double t, double omega, const EnvironmentSpec& spec) {
  require_positive_omega(omega);
  return nested_oracle(t, omega, spec, InnerTrig::sine, false);
}

double anomalous_diffusion_limit(double omega, const EnvironmentSpec& spec) {
  require_positive_omega(omega);
  if (spec.cutoff_shape != CutoffShape::lorentzian || spec.bath_temperature > 0) {
    throw NumericError("anomalous limit is available for a Lorentzian cutoff at zero temperature");
  }
  const double r = omega / spec.cutoff;
  return -0.5 * spec.coupling_eff * spec.coupling_eff * omega * std::log(spec.cutoff / omega) /
         (1.0 + r * r);
}

DiffusionResult diffusion(double t, double omega, const EnvironmentSpec& spec,
                          DiffusionMethod method, double tau) {
  DiffusionResult r;
  r.method = method;
  switch (method) {
    case DiffusionMethod::exact: {
      r.normal = diffusion_exact(t, omega, spec);
      QuadratureOptions o;
      // D(s) itself carries ~1e-13 relative noise at large cutoff * s.
      o.abs_tol = 1e-12 * std::max(diffusion_asymptotic(omega, spec) * t, 1e-300);
      o.rel_tol = 1e-11;
      if (t > 0) {
        r.normal_integral = integrate_piecewise(
            [&](double s) { return diffusion_exact(s, omega, spec); }, 0.0, t, kPi / omega, o).value;
      }
      r.anomalous = anomalous_from_kernel(t, omega, spec, false);
      r.anomalous_integral = anomalous_from_kernel(t, omega, spec, true);
      break;
    }
    case DiffusionMethod::asymptotic: {
      r.normal = diffusion_asymptotic(omega, spec);
      r.anomalous = anomalous_diffusion_asymptotic(omega, tau, spec).value;
      r.normal_integral = r.normal * t;
      r.anomalous_integral = r.anomalous * t;
      break;
    }
    case DiffusionMethod::thermal_expansion: {
      const double beta = spec.beta();
      r.normal = diffusion_thermal(t, omega, beta, spec);
      const double g2 = spec.coupling_eff * spec.coupling_eff;
      double integral = omega * t * si(omega * t) + std::cos(omega * t) - 1.0;
      if (!std::isinf(beta)) {
        const double bh = beta * spec.hbar;
        integral += 2.0 * (1.0 - std::cos(omega * t)) / (omega * omega * bh * bh);
      }
      r.normal_integral = 0.5 * g2 * integral;
      r.anomalous = anomalous_diffusion_asymptotic(omega, tau, spec).value;
      r.anomalous_integral = r.anomalous * t;
      break;
    }
    case DiffusionMethod::quadrature_oracle: {
      r.normal = diffusion_oracle(t, omega, spec);
      r.anomalous = anomalous_diffusion_oracle(t, omega, spec);
      r.normal_integral = nested_oracle(t, omega, spec, InnerTrig::cosine, true);
      r.anomalous_integral = nested_oracle(t, omega, spec, InnerTrig::sine, true);
      break;
    }
  }
  return r;
}

NullTables make_null_tables(const SpatialProfile& profile, double epsilon) {
  return NullTables{NullCoordinateTable(profile, NullBranch::u, 0.0),
                    NullCoordinateTable(profile, NullBranch::v, epsilon)};
}

namespace {

std::pair<double, double> v_pair(const NullCoordinateTable& table, const SpatialProfile& profile,
                                 double omega) {
  if (omega == 0.0) return {profile.upper - profile.lower, 0.0};
  QuadratureOptions o;
  o.abs_tol = 1e-10;
  o.max_intervals = 400000;
  double v1 = 0.0, v2 = 0.0;
  const auto& knots = table.knots();
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    if (table.excluded(0.5 * (a + b))) {
      v1 += 0.5 * (b - a);
      continue;
    }
    const auto c2 = [&](double x) { return std::cos(2.0 * omega * table(x)); };
    const auto s2 = [&](double x) { return std::sin(2.0 * omega * table(x)); };
    v1 += 0.5 * (b - a) + 0.5 * integrate_adaptive(c2, a, b, o).value;
    v2 += 0.5 * integrate_adaptive(s2, a, b, o).value;
  }
  return {v1, v2};
}

}  // namespace

VCoefficients v_coefficients(const NullTables& tables, const SpatialProfile& profile, double omega) {
  if (!(omega >= 0)) throw ConfigError("frequency omega must be >= 0");
  VCoefficients vc;
  vc.omega = omega;
  vc.epsilon = tables.v.epsilon();
  std::tie(vc.v1_u, vc.v2_u) = v_pair(tables.u, profile, omega);
  std::tie(vc.v1_v, vc.v2_v) = v_pair(tables.v, profile, omega);
  return vc;
}

VCoefficients v_coefficients(const SpatialProfile& profile, double omega, double epsilon) {
  return v_coefficients(make_null_tables(profile, epsilon), profile, omega);
}

std::vector<double> allowed_frequencies(const NullCoordinateTable& u_table, double omega_max) {
  const double circumference = std::abs(u_table.total());
  if (!(circumference > 0)) throw NumericError("null-coordinate circumference must be > 0");
  const double base = kTwoPi / circumference;
  std::vector<double> out;
  for (int n = 1; n * base <= omega_max * (1.0 + 1e-12); ++n) out.push_back(n * base);
  return out;
}

double spatial_factor(const VCoefficients& vc, NullBranch branch, double tau, bool full) {
  const double v1 = branch == NullBranch::u ? vc.v1_u : vc.v1_v;
  const double v2 = branch == NullBranch::u ? vc.v2_u : vc.v2_v;
  if (!full) return v1;
  return v1 + 2.0 * std::log(1.0 / (vc.omega * tau)) * v2;
}

DecoherenceEstimate decoherence_time(const PhysicalConfig& config, const DerivedParams& d,
                                     const DecoherenceInputs& in) {
  if (!(in.gamma > 0)) throw ConfigError("noise parameter gamma must be > 0");
  require_positive_omega(in.omega);
  if (!(in.temperature >= 0)) throw ConfigError("temperature must be >= 0");
  if (!(in.v > 0)) throw RegimeError("spatial factor V must be > 0, got " + std::to_string(in.v));
  const double hbar = config.hbar, kb = config.k_boltzmann;
  DecoherenceEstimate e;
  e.omega = in.omega;
  e.gamma = in.gamma;
  e.temperature = in.temperature;
  e.zero_temperature_term = 2.0 * hbar * hbar /
                            (in.gamma * in.gamma * d.delta_v * d.delta * d.delta * in.omega * kPi *
                             d.rho * d.rho * in.v);
  e.thermal_term = -8.0 * kb * kb * in.temperature * in.temperature /
                   (in.omega * in.omega * in.omega * kPi * hbar * hbar);
  e.t_d = e.zero_temperature_term + e.thermal_term;
  if (!(e.t_d > 0)) {
    throw RegimeError("thermal correction dominates: t_D = " + std::to_string(e.t_d) +
                      " at T0 = " + std::to_string(in.temperature));
  }
  return e;
}

double decoherence_time_from_relation(const PhysicalConfig& config, const DerivedParams& d,
                                      const DecoherenceInputs& in) {
  if (!(in.gamma > 0)) throw ConfigError("noise parameter gamma must be > 0");
  require_positive_omega(in.omega);
  if (!(in.v > 0)) throw RegimeError("spatial factor V must be > 0");
  const double g = effective_coupling(in.gamma, config, d);
  const double hbar = config.hbar;
  const double prefactor = d.rho * d.delta * d.delta * in.v / hbar;
  double thermal = 0.0;
  if (in.temperature > 0) {
    const double bh = hbar / (config.k_boltzmann * in.temperature);
    thermal = 2.0 * g * g / (in.omega * in.omega * bh * bh);
  }
  const auto lhs = [&](double t) {
    return prefactor * (g * g * in.omega * kPi * t / 4.0 + thermal) - kDecoherenceCriterion;
  };
  if (lhs(0.0) >= 0) {
    throw RegimeError("thermal term alone exceeds the decoherence criterion");
  }
  double hi = 1.0;
  while (lhs(hi) < 0) {
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("decoherence relation has no root");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double solve_v_max_for_period(PhysicalConfig c) {
  const double v0 = c.uniform_velocity();
  const auto period_of = [&](double v_max) {
    c.v_max = v_max;
    RingProfile ring(c);
    const auto f = [&](double th) { return 1.0 / ring.asymptotic_velocity(th); };
    std::vector<double> cuts{0.0};
    for (double b : ring.breakpoints()) cuts.push_back(b);
    cuts.push_back(kTwoPi);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      sum += integrate_adaptive(f, cuts[i], cuts[i + 1], 1e-14).value;
    }
    return sum - c.period;
  };
  double lo = v0 * (1.0 + 1e-12);
  double hi = 2.0 * v0;
  if (period_of(lo) <= 0) throw ConfigError("v_min at or above 2*pi/period: no collapse possible");
  while (period_of(hi) > 0) {
    hi *= 2.0;
    if (hi > 1e6 * v0) {
      throw ConfigError("no v_max satisfies the one-revolution condition for v_min = " +
                        std::to_string(c.v_min));
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (period_of(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::v_min: return "v_min";
    case SweepAxis::temperature: return "temperature";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "gamma") return SweepAxis::gamma;
  if (text == "v_min") return SweepAxis::v_min;
  if (text == "temperature") return SweepAxis::temperature;
  throw ConfigError("unknown sweep axis '" + text + "' (expected gamma, v_min or temperature)");
}

double ring_hawking_temperature(const PhysicalConfig& config) {
  return std::abs(hawking_temperature_ring(RingProfile(config)).front());
}

namespace {

struct BandContext {
  PhysicalConfig config;
  DerivedParams derived;
  std::vector<VCoefficients> coefficients;
  double t_hawking = 0.0;
};

BandContext make_band_context(const PhysicalConfig& config, const SweepOptions& opt) {
  BandContext ctx;
  ctx.config = config;
  ctx.derived = derive(config);
  RingProfile ring(config);
  const auto snap = ring.snapshot(RingProfile::kLate);
  const double eps = opt.epsilon > 0 ? opt.epsilon : ctx.derived.delta;
  const auto tables = make_null_tables(snap, eps);
  for (double w : allowed_frequencies(tables.u, ctx.derived.omega_max)) {
    ctx.coefficients.push_back(v_coefficients(tables, snap, w));
  }
  if (ctx.coefficients.empty()) throw RegimeError("no allowed frequency below omega_max");
  ctx.t_hawking = std::abs(hawking_temperature_ring(ring).front());
  return ctx;
}

SweepRow band(const BandContext& ctx, double axis_value, double gamma, double temperature,
              const SweepOptions& opt) {
  SweepRow row;
  row.axis_value = axis_value;
  if (temperature > 100.0 * ctx.t_hawking) {
    throw RegimeError("T0 = " + std::to_string(temperature) +
                      " exceeds the low-temperature validity bound 100 T_H = " +
                      std::to_string(100.0 * ctx.t_hawking));
  }
  row.t_d_min = std::numeric_limits<double>::infinity();
  row.t_d_max = -std::numeric_limits<double>::infinity();
  row.omega_min = ctx.coefficients.front().omega;
  row.omega_max = ctx.coefficients.back().omega;
  for (const auto& vc : ctx.coefficients) {
    DecoherenceInputs in{gamma, vc.omega, temperature,
                         spatial_factor(vc, opt.branch, ctx.derived.tau, opt.full_v)};
    const auto e = decoherence_time(ctx.config, ctx.derived, in);
    if (e.t_d < row.t_d_min) {
      row.t_d_min = e.t_d;
      row.omega_at_t_d_min = vc.omega;
    }
    row.t_d_max = std::max(row.t_d_max, e.t_d);
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_decoherence(SweepAxis axis, const std::vector<double>& values,
                                        const PhysicalConfig& config, const SweepOptions& opt) {
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  if (axis == SweepAxis::v_min) {
    for (double v : values) {
      try {
        PhysicalConfig c = config;
        c.v_min = v;
        c.v_max = solve_v_max_for_period(c);
        validate(c);
        rows.push_back(band(make_band_context(c, opt), v, opt.gamma, opt.temperature, opt));
      } catch (const Error& e) {
        SweepRow row;
        row.axis_value = v;
        row.error = e.what();
        rows.push_back(row);
      }
    }
    return rows;
  }
  const BandContext ctx = make_band_context(config, opt);
  for (double v : values) {
    try {
      const double gamma = axis == SweepAxis::gamma ? v : opt.gamma;
      const double temperature = axis == SweepAxis::temperature ? v : opt.temperature;
      rows.push_back(band(ctx, v, gamma, temperature, opt));
    } catch (const Error& e) {
      SweepRow row;
      row.axis_value = v;
      row.error = e.what();
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace abh
