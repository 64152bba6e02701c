#include "abh/correlations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "abh/error.hpp"
#include "abh/quadrature.hpp"

namespace abh {
namespace {

using Region = LineProfile::Region;
using cd = std::complex<double>;

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// ln cosech^2(z), z > 0.
double log_cosech_sq(double z) {
  if (z < 20.0) return -2.0 * std::log(std::sinh(z));
  return std::log(4.0) - 2.0 * z - 2.0 * std::log1p(-std::exp(-2.0 * z));
}

// Richardson table on samples f(h_j) with h_{j+1} = h_j / 2 and error expansion in
// h^{order}, h^{2 order}, ...
struct Richardson {
  cd value;
  cd error;
};

Richardson richardson(const std::vector<cd>& samples, int order) {
  std::vector<std::vector<cd>> table(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    table[i].push_back(samples[i]);
    double factor = std::pow(2.0, order);
    for (std::size_t j = 1; j <= i; ++j) {
      table[i].push_back(table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0));
      factor *= std::pow(2.0, order);
    }
  }
  const std::size_t n = samples.size();
  return {table[n - 1][n - 1], table[n - 1][n - 1] - table[n - 2][n - 2]};
}

// int_0^inf q^p e^{-i s q} g(eta q) dq, extrapolated eta -> 0. Independent of |d|,
// so cached per (p, s, regulator).
Richardson scaled_vacuum_integral(double p, int s, Regulator reg) {
  static std::mutex mutex;
  static std::map<std::tuple<double, int, int>, Richardson> cache;
  const auto key = std::make_tuple(p, s, static_cast<int>(reg));
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const std::array<double, 6> etas = {0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
  std::vector<cd> samples;
  for (double eta : etas) {
    const bool gauss = reg == Regulator::gaussian;
    const double q_max = gauss ? 9.0 / eta : 60.0 / eta;
    const auto weight = [&](double q) {
      return std::pow(q, p) * (gauss ? std::exp(-eta * eta * q * q) : std::exp(-eta * q));
    };
    QuadratureOptions o;
    o.abs_tol = 1e-12;
    const double re =
        integrate_piecewise([&](double q) { return weight(q) * std::cos(q); }, 0.0, q_max, kPi, o).value;
    const double im =
        integrate_piecewise([&](double q) { return -s * weight(q) * std::sin(q); }, 0.0, q_max, kPi, o)
            .value;
    samples.emplace_back(re, im);
  }
  const Richardson r = richardson(samples, reg == Regulator::gaussian ? 2 : 1);
  std::lock_guard<std::mutex> lock(mutex);
  cache[key] = r;
  return r;
}

// int_0^inf 2 k^p cos/sin(k d) / (e^{beta k} - 1) dk.
cd thermal_excess(double p, double d, double beta) {
  if (std::isinf(beta)) return {0.0, 0.0};
  if (!(beta > 0)) throw ConfigError("beta must be positive");
  const double k_max = 45.0 / beta;
  const double piece = std::min(d != 0.0 ? kPi / std::abs(d) : k_max, 1.0 / beta);
  const auto bose = [&](double k) {
    if (k == 0.0) return p == 1.0 ? 2.0 / beta : 0.0;
    return 2.0 * std::pow(k, p) / std::expm1(beta * k);
  };
  QuadratureOptions o;
  o.abs_tol = 1e-13 * std::pow(k_max, p + 1.0);
  const double re =
      integrate_piecewise([&](double k) { return bose(k) * std::cos(k * d); }, 0.0, k_max, piece, o).value;
  const double im =
      integrate_piecewise([&](double k) { return -bose(k) * std::sin(k * d); }, 0.0, k_max, piece, o).value;
  return {re, im};
}

double outer_boundary(double t, const LineProfile& p) { return entanglement_boundary(t, p).second; }

// Foot point of the left-moving characteristic used by the mode-sum oracle.
double foot_point(double x, double t, const LineProfile& p, MatchConvention conv) {
  const double xp = outer_boundary(t, p);
  const double f = p.accumulated(t);
  if (x > xp) return x + t - f * p.v_max();
  if (x < -xp) return x + t - f * p.v_min();
  return asymptotic_left_x0(x, t, p, conv);
}

struct FootDerivative {
  double x0;
  double d;  // d_t X + v d_x X
};

FootDerivative foot_derivative(double x, double t, const LineProfile& p, MatchConvention conv) {
  const double hx = 1e-4 * p.a();
  const double ht = std::min(1e-4 * p.a(), 0.5 * t);
  const double dxx = (foot_point(x + hx, t, p, conv) - foot_point(x - hx, t, p, conv)) / (2 * hx);
  const double dtx = (foot_point(x, t + ht, p, conv) - foot_point(x, t - ht, p, conv)) / (2 * ht);
  return {foot_point(x, t, p, conv), momentum_of_field(dtx, dxx, p.velocity(x, t))};
}

}  // namespace

double momentum_of_field(double dphi_dt, double dphi_dx, double velocity) {
  return dphi_dt + velocity * dphi_dx;
}

const char* to_string(CorrelationMethod m) {
  switch (m) {
    case CorrelationMethod::closed_form: return "closed_form";
    case CorrelationMethod::mode_sum_oracle: return "mode_sum_oracle";
    case CorrelationMethod::monte_carlo: return "monte_carlo";
    case CorrelationMethod::homogeneous: return "homogeneous";
  }
  return "unknown";
}

const char* to_string(CrossTermReading r) {
  return r == CrossTermReading::symmetric ? "symmetric" : "literal";
}

PeakReport detect_peak(const CorrelationGrid& grid, const PeakOptions& options) {
  const auto& s = grid.samples;
  if (s.size() < 16) throw ConfigError("peak detection needs at least 16 samples");
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs(s[i].value) > std::abs(s[best].value)) best = i;
  }
  PeakReport r;
  r.location = s[best].x2;
  r.height = std::abs(s[best].value);
  std::vector<double> off;
  for (const auto& sample : s) {
    if (std::abs(sample.x2 - r.location) > options.exclusion_half_width) {
      off.push_back(std::abs(sample.value));
    }
  }
  if (off.empty()) throw ConfigError("grid lies entirely inside the peak exclusion window");
  const auto mid = off.begin() + static_cast<std::ptrdiff_t>(off.size() / 2);
  std::nth_element(off.begin(), mid, off.end());
  double median = *mid;
  if (off.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(off.begin(), mid));
  }
  r.background = median;
  r.contrast = median > 0 ? r.height / median : (r.height > 0 ? kInfiniteBeta : 0.0);
  if (best > 0 && best + 1 < s.size() && r.height > 0) {
    const double left = std::abs(s[best - 1].value) / r.height;
    const double right = std::abs(s[best + 1].value) / r.height;
    r.interior = left > options.neighbour_ratio && right > options.neighbour_ratio;
  }
  r.present = r.interior && r.contrast > options.threshold;
  return r;
}

RegulatedValue thermal_mode_integral(double p, double d, double beta, Regulator regulator) {
  if (!(p > 0)) throw ConfigError("spectral power must be positive");
  if (d == 0.0) throw NumericError("coincident points: the regulated k-integral diverges");
  const int s = d > 0 ? 1 : -1;
  const Richardson vac = scaled_vacuum_integral(p, s, regulator);
  const double scale = std::pow(std::abs(d), -(p + 1.0));
  const cd value = vac.value * scale + thermal_excess(p, d, beta);
  return {value, vac.error * scale};
}

RegulatedValue corr_homogeneous(double dx, double t, double beta, const LineProfile& profile,
                                Region region, SpectralMeasure measure, Regulator regulator) {
  const double kappa = region == Region::transition ? profile.kappa() : 0.0;
  const double stretch = std::exp(-kappa * profile.accumulated(t));
  const double d = dx * stretch;
  if (measure == SpectralMeasure::as_printed) {
    const RegulatedValue r = thermal_mode_integral(1.5, d, beta, regulator);
    const double pre = stretch / std::sqrt(2.0);
    return {pre * r.value, pre * r.error_estimate};
  }
  const RegulatedValue r = thermal_mode_integral(1.0, d, beta, regulator);
  const double pre = stretch * stretch;
  return {pre * r.value, pre * r.error_estimate};
}

bool in_entanglement_pair(double x1, double x2, double t, const LineProfile& profile) {
  if (x1 > x2) std::swap(x1, x2);
  const double a = profile.a();
  const double xp = outer_boundary(t, profile);
  return x1 > -xp && x1 < -a && x2 > a && x2 < xp;
}

namespace {

struct LogFoot {
  double log_x2;      // ln X2, X2 > 0
  double log_abs_x1;  // ln |X1|, X1 < 0
};

LogFoot log_feet(double x1, double x2, double t, const LineProfile& p, MatchConvention conv) {
  const double a = p.a();
  const double f = p.accumulated(t);
  const double shift = conv == MatchConvention::symmetric ? a : -a;
  return {std::log(a) + (x2 + t - f * p.v_max() - a) / a,
          std::log(a) - (x1 + t - f * p.v_min() + shift) / a};
}

double thermal_pair(double log_prefactor, double log_sep, double beta) {
  // -(pi/beta)^2 e^{log_prefactor} cosech^2(pi e^{log_sep} / beta), beta = inf -> 1/sep^2.
  if (std::isinf(beta)) return -std::exp(log_prefactor - 2.0 * log_sep);
  const double log_z = std::log(kPi / beta) + log_sep;
  if (log_z > 700.0) return -0.0;
  const double z = std::exp(log_z);
  return -std::exp(2.0 * std::log(kPi / beta) + log_prefactor + log_cosech_sq(z));
}

}  // namespace

double corr_closed_form(double x1, double x2, double t, double beta, const LineProfile& profile,
                        MatchConvention convention) {
  if (!(beta > 0)) throw ConfigError("beta must be positive (use +inf for zero temperature)");
  if (!in_entanglement_pair(x1, x2, t, profile)) {
    throw RegimeError("points outside the entanglement region; use corr_homogeneous");
  }
  if (x1 > x2) std::swap(x1, x2);
  const LogFoot lf = log_feet(x1, x2, t, profile, convention);
  const double log_a = std::log(profile.a());
  const double log_pre = (lf.log_x2 - log_a) + (lf.log_abs_x1 - log_a);
  return thermal_pair(log_pre, log_add_exp(lf.log_x2, lf.log_abs_x1), beta);
}

double corr_closed_form_printed(double x1, double x2, double t, double beta,
                                const LineProfile& profile) {
  if (!(beta > 0)) throw ConfigError("beta must be positive (use +inf for zero temperature)");
  if (!in_entanglement_pair(x1, x2, t, profile)) {
    throw RegimeError("points outside the entanglement region; use corr_homogeneous");
  }
  if (x1 > x2) std::swap(x1, x2);
  const double a = profile.a();
  const double f = profile.accumulated(t);
  const double log_pre = (x1 - x2) / a - profile.delta_v() * f / a;
  const double log_arg = std::log(a) - (a + t + x2) / a + profile.v_max() * f / a +
                         log_add_exp((2 * t + x1 + x2) / a, 2.0 + profile.sigma_v() * f / a);
  return thermal_pair(log_pre, log_arg, beta);
}

double mirrored_peak_position(double x1, double t, const LineProfile& profile,
                              MatchConvention convention) {
  const double a = profile.a();
  const double f = profile.accumulated(t);
  const double shift = convention == MatchConvention::symmetric ? a : -a;
  return -x1 - 2.0 * t + f * profile.sigma_v() + a - shift;
}

ModeSumResult corr_mode_sum_oracle(double x1, double x2, double t, double beta,
                                   const LineProfile& profile, MatchConvention convention) {
  if (!(beta > 0)) throw ConfigError("beta must be positive (use +inf for zero temperature)");
  if (!(t > 0)) throw ConfigError("mode-sum oracle needs t > 0");
  const FootDerivative f1 = foot_derivative(x1, t, profile, convention);
  const FootDerivative f2 = foot_derivative(x2, t, profile, convention);
  ModeSumResult r;
  r.d1 = f1.d;
  r.d2 = f2.d;
  r.separation = f1.x0 - f2.x0;
  const RegulatedValue k_int = thermal_mode_integral(1.0, r.separation, beta);
  r.value = r.d1 * r.d2 * k_int.value.real();
  r.error_estimate = std::abs(r.d1 * r.d2 * k_int.error_estimate.real());
  if (!std::isinf(beta)) {
    // Tail of 2k/(e^{beta k}-1) beyond k_max = 45/beta, relative to the thermal scale.
    const double k_max = 45.0 / beta;
    const double tail = 2.0 * (k_max / beta + 1.0 / (beta * beta)) * std::exp(-beta * k_max);
    r.truncation_bound = tail / std::max(std::abs(k_int.value.real()), 1e-300);
  }
  return r;
}

double correlation_value(double x1, double x2, double t, double beta, const LineProfile& profile,
                         MatchConvention convention) {
  if (in_entanglement_pair(x1, x2, t, profile)) {
    return corr_closed_form(x1, x2, t, beta, profile, convention);
  }
  const double a = profile.a();
  const Region region =
      std::abs(x1) <= a && std::abs(x2) <= a ? Region::transition : Region::outer_right;
  return std::abs(corr_homogeneous(x1 - x2, t, beta, profile, region).value);
}

CorrelationGrid correlation_grid(double x1, const std::vector<double>& x2s, double t, double beta,
                                 const LineProfile& profile, CorrelationMethod method,
                                 MatchConvention convention) {
  CorrelationGrid g;
  g.t = t;
  g.x1 = x1;
  g.temperature = std::isinf(beta) ? 0.0 : 1.0 / beta;
  g.method = method;
  std::vector<double> xs = x2s;
  std::sort(xs.begin(), xs.end());
  for (double x2 : xs) {
    double v = 0.0;
    switch (method) {
      case CorrelationMethod::closed_form:
        v = correlation_value(x1, x2, t, beta, profile, convention);
        break;
      case CorrelationMethod::mode_sum_oracle:
        v = corr_mode_sum_oracle(x1, x2, t, beta, profile, convention).value;
        break;
      case CorrelationMethod::homogeneous:
        v = std::abs(corr_homogeneous(x1 - x2, t, beta, profile).value);
        break;
      case CorrelationMethod::monte_carlo:
        throw ConfigError("Monte-Carlo grids come from the Langevin ensemble");
    }
    if (!std::isfinite(v)) throw NumericError("non-finite correlation at x2 = " + std::to_string(x2));
    g.samples.push_back({x2, v, 0.0});
  }
  return g;
}

OpenCorrection open_correction_er(double k, double t, double lambda, double temperature,
                                  const LineProfile& profile, CrossTermReading reading, double dx) {
  if (!(k > 0)) throw ConfigError("e_r needs k > 0");
  if (!(t >= 0)) throw ConfigError("e_r needs t >= 0");
  if (!(lambda >= 0)) throw ConfigError("coupling must be non-negative");
  if (!(temperature >= 0)) throw ConfigError("temperature must be non-negative");
  OpenCorrection out;
  std::vector<std::string> warnings;
  const double t_h = hawking_temperature_line(profile.v_max(), profile.v_min(), profile.a());
  if (t_h > 0 && (temperature < 10.0 * t_h || temperature > 1000.0 * t_h)) {
    warnings.push_back("T0 outside the high-temperature regime (10..1000 T_H)");
  }
  if (lambda > 1e-2) warnings.push_back("coupling not small; first-order expansion questionable");

  // Stretched time Xi on nodes; Hermite interpolation with the exact slope e^{-kappa F}.
  const double kappa = profile.kappa();
  const auto slope = [&](double s) { return std::exp(-kappa * profile.accumulated(s)); };
  double h = 0.0;
  if (t > 0) {
    const int n = std::max(16, static_cast<int>(std::ceil(8.0 * t / std::min(profile.tau(), 1.0))));
    std::vector<double> nodes(n + 1), xi(n + 1), dxi(n + 1);
    QuadratureOptions o;
    o.abs_tol = 1e-15;
    o.rel_tol = 1e-14;
    for (int i = 0; i <= n; ++i) {
      nodes[i] = t * i / n;
      dxi[i] = slope(nodes[i]);
      xi[i] = i == 0 ? 0.0 : xi[i - 1] + integrate_adaptive(slope, nodes[i - 1], nodes[i], o).value;
    }
    const auto xi_at = [&](double s) {
      const double u = std::clamp(s / t * n, 0.0, static_cast<double>(n));
      const int i = std::min(static_cast<int>(u), n - 1);
      const double w = nodes[i + 1] - nodes[i];
      const double r = (s - nodes[i]) / w;
      const double h00 = (1 + 2 * r) * (1 - r) * (1 - r), h10 = r * (1 - r) * (1 - r);
      const double h01 = r * r * (3 - 2 * r), h11 = r * r * (r - 1);
      return h00 * xi[i] + h10 * w * dxi[i] + h01 * xi[i + 1] + h11 * w * dxi[i + 1];
    };
    const double xi_t = xi[n];
    if (k * xi_t > kPi / 2) warnings.push_back("k Xi(t) > pi/2: outside the small-k window");
    const auto integrand = [&](double s) {
      const double c = std::cos(k * (xi_t - xi_at(s)));
      return c * c;
    };
    o.abs_tol = 1e-13 * t;
    h = integrate_piecewise(integrand, 0.0, t, std::min(t / 8.0, kPi / (4.0 * k)), o).value;
  }
  out.overlap = h;
  const double thermal =
      temperature > 0 ? 2.0 * temperature * std::tanh(k / (2.0 * temperature)) / k : 0.0;
  const cd c_d = reading == CrossTermReading::symmetric ? cd(2.0, 0.0)
                                                        : 1.0 + std::exp(cd(0.0, -k * dx));
  out.e_r = lambda * lambda * h * std::abs(c_d + thermal);
  if (!warnings.empty()) {
    std::string w = warnings.front();
    for (std::size_t i = 1; i < warnings.size(); ++i) w += "; " + warnings[i];
    out.warning = w;
  }
  return out;
}

}  // namespace abh
