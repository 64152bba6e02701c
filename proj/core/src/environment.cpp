#include "abh/environment.hpp"

#include <cmath>

#include "abh/error.hpp"
#include "abh/quadrature.hpp"

namespace abh {
namespace {

constexpr double kRelTol = 1e-8;
constexpr double kAbsFloor = 1e-12;

// nu coth(beta hbar nu / 2), with the zero-temperature limit nu.
double thermal_weight(double nu, const EnvironmentSpec& spec) {
  const double beta = spec.beta();
  if (std::isinf(beta)) return nu;
  const double x = 0.5 * beta * spec.hbar * nu;
  if (x < 1e-8) return 2.0 / (beta * spec.hbar);
  return nu / std::tanh(x);
}

QuadratureOptions kernel_options() {
  QuadratureOptions o;
  o.abs_tol = kAbsFloor;
  o.rel_tol = kRelTol;
  o.max_intervals = 20000;
  return o;
}

}  // namespace

const char* to_string(CutoffShape shape) {
  return shape == CutoffShape::exponential ? "exponential" : "lorentzian";
}

CutoffShape parse_cutoff_shape(const std::string& text) {
  if (text == "exponential") return CutoffShape::exponential;
  if (text == "lorentzian") return CutoffShape::lorentzian;
  throw ConfigError("field 'cutoff_shape': expected 'exponential' or 'lorentzian', got '" + text + "'");
}

void validate(const EnvironmentSpec& s) {
  if (!(s.coupling_eff >= 0)) throw ConfigError("environment: coupling must be >= 0");
  if (!(s.cutoff > 0)) throw ConfigError("environment: cutoff must be > 0");
  if (!(s.bath_temperature >= 0)) throw ConfigError("environment: bath temperature must be >= 0");
}

double cutoff_function(double nu, const EnvironmentSpec& spec) {
  const double r = nu / spec.cutoff;
  return spec.cutoff_shape == CutoffShape::exponential ? std::exp(-r) : 1.0 / (1.0 + r * r);
}

double spectral_density(double nu, const EnvironmentSpec& spec) {
  if (nu < 0) throw NumericError("spectral density requires nu >= 0");
  return spec.coupling_eff * spec.coupling_eff * nu * cutoff_function(nu, spec);
}

double noise_kernel(double lag, const EnvironmentSpec& spec) {
  validate(spec);
  const double g2 = spec.coupling_eff * spec.coupling_eff;
  if (g2 == 0.0) return 0.0;
  const double s = std::abs(lag);
  const auto opts = kernel_options();
  if (s == 0.0) {
    if (spec.cutoff_shape == CutoffShape::lorentzian && std::isinf(spec.beta())) {
      throw NumericError("Lorentzian noise kernel at zero temperature diverges at zero lag");
    }
    const auto f = [&](double nu) { return thermal_weight(nu, spec) * cutoff_function(nu, spec); };
    return 0.5 * g2 * integrate_to_infinity(f, 0.0, opts).value;
  }
  const auto f = [&](double nu) {
    return thermal_weight(nu, spec) * cutoff_function(nu, spec) * std::cos(nu * s);
  };
  return 0.5 * g2 * integrate_oscillatory(f, 0.0, kPi / s, opts, 200000).value;
}

double dissipation_kernel(double lag, const EnvironmentSpec& spec) {
  validate(spec);
  if (!(lag > 0)) return 0.0;
  const double g2 = spec.coupling_eff * spec.coupling_eff;
  if (g2 == 0.0) return 0.0;
  const auto f = [&](double nu) { return nu * cutoff_function(nu, spec) * std::sin(nu * lag); };
  return g2 * integrate_oscillatory(f, 0.0, kPi / lag, kernel_options(), 200000).value;
}

double effective_coupling(double gamma, const PhysicalConfig& config, const DerivedParams& derived) {
  if (!(gamma >= 0)) throw ConfigError("noise parameter gamma must be >= 0");
  return gamma * std::sqrt(2.0 * derived.rho / config.hbar) * derived.delta_v;
}

double default_cutoff(const DerivedParams& derived) { return 1.0 / derived.tau; }

double noise_gamma_from_doc(const KeyValueDoc& doc) {
  const double g = doc.number_or("noise_gamma", 1e-8);
  if (!(g >= 0)) throw ConfigError("field 'noise_gamma': expected >= 0");
  return g;
}

EnvironmentSpec environment_from_doc(const KeyValueDoc& doc, const PhysicalConfig& config,
                                     const DerivedParams& derived) {
  EnvironmentSpec e;
  e.coupling_eff = effective_coupling(noise_gamma_from_doc(doc), config, derived);
  e.cutoff = doc.number_or("cutoff", default_cutoff(derived));
  e.cutoff_shape = parse_cutoff_shape(doc.text_or("cutoff_shape", "lorentzian"));
  e.bath_temperature = doc.number_or("bath_temperature", 0.0);
  e.hbar = config.hbar;
  e.k_boltzmann = config.k_boltzmann;
  validate(e);
  return e;
}

std::optional<std::string> cutoff_closure_warning(const EnvironmentSpec& spec,
                                                  const DerivedParams& derived) {
  const double product = spec.cutoff * derived.tau;
  if (product > 2.0 || product < 0.5) {
    return "cutoff * tau = " + std::to_string(product) +
           "; the coupling conversion assumes cutoff * tau ~ 1";
  }
  return std::nullopt;
}

}  // namespace abh
