#pragma once

#include <limits>
#include <optional>
#include <string>

#include "abh/params.hpp"

namespace abh {

enum class CutoffShape { exponential, lorentzian };

const char* to_string(CutoffShape shape);
CutoffShape parse_cutoff_shape(const std::string& text);

/// Ohmic bath: J(nu) = coupling_eff^2 nu f(nu).
struct EnvironmentSpec {
  double coupling_eff = 0.0;
  double cutoff = 1.0;
  CutoffShape cutoff_shape = CutoffShape::lorentzian;
  double bath_temperature = 0.0;
  double hbar = 1.0;
  double k_boltzmann = 1.0;

  /// 1 / (k_B T0); +inf at zero temperature.
  double beta() const {
    return bath_temperature > 0 ? 1.0 / (k_boltzmann * bath_temperature)
                                : std::numeric_limits<double>::infinity();
  }
};

/// Throws ConfigError on a negative coupling/temperature or non-positive cutoff.
void validate(const EnvironmentSpec& spec);

double cutoff_function(double nu, const EnvironmentSpec& spec);
double spectral_density(double nu, const EnvironmentSpec& spec);

/// N(s) = 1/2 int_0^inf J(nu) coth(beta hbar nu / 2) cos(nu s) dnu. The implicit
/// spatial delta is not materialized. Lorentzian at T0 = 0 diverges at s = 0.
double noise_kernel(double lag, const EnvironmentSpec& spec);
/// D(s) = int_0^inf J(nu) sin(nu s) dnu for s > 0, zero otherwise.
double dissipation_kernel(double lag, const EnvironmentSpec& spec);

/// gamma_eff = gamma sqrt(2 rho / hbar) (v_max - v_min).
double effective_coupling(double gamma, const PhysicalConfig& config, const DerivedParams& derived);

/// Lambda = 1 / tau.
double default_cutoff(const DerivedParams& derived);

/// Optional environment keys of a config document: noise_gamma (default 1e-8),
/// cutoff (default 1/tau), cutoff_shape (default lorentzian), bath_temperature (default 0).
EnvironmentSpec environment_from_doc(const KeyValueDoc& doc, const PhysicalConfig& config,
                                     const DerivedParams& derived);
double noise_gamma_from_doc(const KeyValueDoc& doc);

/// Non-empty when Lambda tau departs from 1 by more than a factor 2.
std::optional<std::string> cutoff_closure_warning(const EnvironmentSpec& spec,
                                                  const DerivedParams& derived);

}  // namespace abh
