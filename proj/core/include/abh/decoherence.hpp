#pragma once

#include <string>
#include <vector>

#include "abh/environment.hpp"
#include "abh/params.hpp"
#include "abh/profile.hpp"

namespace abh {

enum class DiffusionMethod { exact, asymptotic, thermal_expansion, quadrature_oracle };
const char* to_string(DiffusionMethod method);

struct DiffusionResult {
  double normal = 0.0;
  double anomalous = 0.0;
  double normal_integral = 0.0;
  double anomalous_integral = 0.0;
  DiffusionMethod method = DiffusionMethod::exact;
};

/// Closed-form D(t) for a Lorentzian cutoff at zero temperature.
double diffusion_exact(double t, double omega, const EnvironmentSpec& spec);

/// D(t) = (g^2/2) int dnu nu f(nu) coth(beta hbar nu/2) int_0^t ds cos(nu s) cos(omega s),
/// both integrals by quadrature. Any cutoff shape and temperature.
double diffusion_oracle(double t, double omega, const EnvironmentSpec& spec);

/// Low-temperature expansion (g^2/2)[omega Si(omega t) + 2 sin(omega t) / (omega beta^2 hbar^2)].
/// Cutoff-free; beta = +inf allowed. Throws for beta <= 0.
double diffusion_thermal(double t, double omega, double beta, const EnvironmentSpec& spec);

/// Oracle for the expansion: omega Si(omega t) plus the sharp-split thermal part
/// int_0^{nu_c} (2/(beta hbar) - nu) I(nu, t) dnu with nu_c = 2/(beta hbar).
double diffusion_thermal_split_oracle(double t, double omega, double beta,
                                      const EnvironmentSpec& spec);
/// Same with the exact Bose weight: omega Si(omega t) + int nu (coth - 1) I(nu, t) dnu.
double diffusion_thermal_full_oracle(double t, double omega, double beta,
                                     const EnvironmentSpec& spec);

/// Asymptotic normal coefficient g^2 omega pi / 4.
double diffusion_asymptotic(double omega, const EnvironmentSpec& spec);

struct AnomalousAsymptote {
  double value = 0.0;
  /// Set when omega tau >= 1 (non-positive logarithm).
  std::string warning;
};

/// f ~ (g^2/2) pi omega log(1 / (omega tau)).
AnomalousAsymptote anomalous_diffusion_asymptotic(double omega, double tau,
                                                  const EnvironmentSpec& spec);
/// f(t) = int_0^t N(s) sin(omega s) ds by nested quadrature in (nu, s).
double anomalous_diffusion_oracle(double t, double omega, const EnvironmentSpec& spec);
/// t -> inf principal-value limit for a Lorentzian cutoff at zero temperature:
/// -(g^2/2) omega ln(Lambda/omega) / (1 + omega^2/Lambda^2).
double anomalous_diffusion_limit(double omega, const EnvironmentSpec& spec);

DiffusionResult diffusion(double t, double omega, const EnvironmentSpec& spec, DiffusionMethod method,
                          double tau);

struct VCoefficients {
  double v1_u = 0.0, v2_u = 0.0, v1_v = 0.0, v2_v = 0.0;
  double omega = 0.0;
  double epsilon = 0.0;
};

/// Tabulated null coordinates of a frozen profile, reusable across frequencies.
struct NullTables {
  NullCoordinateTable u;
  NullCoordinateTable v;
};
NullTables make_null_tables(const SpatialProfile& profile, double epsilon);

/// V1 = int cos^2(omega x), V2 = int cos(omega x) sin(omega x) over the profile
/// range for x = x_u and x = x_v. Inside the excluded windows of x_v the
/// integrands are replaced by their phase averages 1/2 and 0.
VCoefficients v_coefficients(const NullTables& tables, const SpatialProfile& profile, double omega);
VCoefficients v_coefficients(const SpatialProfile& profile, double omega, double epsilon);

/// Multiples of 2 pi / X_u with X_u the x_u circumference, up to omega_max.
std::vector<double> allowed_frequencies(const NullCoordinateTable& u_table, double omega_max);

/// Constant of the decoherence relation (rho delta^2 / hbar) int_0^tD (D V1 + f V2) = 1.
inline constexpr double kDecoherenceCriterion = 1.0;

struct DecoherenceInputs {
  double gamma = 0.0;           // experimental noise parameter
  double omega = 0.0;
  double temperature = 0.0;     // T0
  double v = 0.0;               // spatial factor V
};

struct DecoherenceEstimate {
  double t_d = 0.0;
  double omega = 0.0;
  double gamma = 0.0;
  double temperature = 0.0;
  double zero_temperature_term = 0.0;
  double thermal_term = 0.0;
};

/// t_D(0) = 2 hbar^2 / (gamma^2 dv delta^2 omega pi rho^2 V) - 8 k_B^2 T0^2 / (omega^3 pi hbar^2).
/// Throws RegimeError if the result is not positive.
DecoherenceEstimate decoherence_time(const PhysicalConfig& config, const DerivedParams& derived,
                                     const DecoherenceInputs& in);

/// V1 or, with full = true, V1 + 2 log(1/(omega tau)) V2, on the chosen branch.
double spatial_factor(const VCoefficients& vc, NullBranch branch, double tau, bool full);

/// Root of (rho delta^2 V / hbar) [g^2 omega pi t / 4 + 2 g^2 / (omega^2 beta^2 hbar^2)] = criterion,
/// with g the effective coupling. Bisection.
double decoherence_time_from_relation(const PhysicalConfig& config, const DerivedParams& derived,
                                      const DecoherenceInputs& in);

/// Revolution condition int_0^{2 pi} dtheta / v = T solved for v_max at fixed v_min.
double solve_v_max_for_period(PhysicalConfig config);

enum class SweepAxis { gamma, v_min, temperature };
const char* to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& text);

struct SweepRow {
  double axis_value = 0.0;
  double t_d_min = 0.0, t_d_max = 0.0;
  double omega_min = 0.0, omega_max = 0.0;  // frequency range of the band
  double omega_at_t_d_min = 0.0;            // worst case
  std::string error;                        // empty on success
};

struct SweepOptions {
  double gamma = 1e-8;        // held fixed on the v_min and temperature axes
  double temperature = 0.0;   // held fixed on the gamma and v_min axes
  double epsilon = 0.0;       // x_v exclusion half-width; 0 means delta
  bool full_v = false;
  NullBranch branch = NullBranch::u;
};

/// One row per axis value; per-point failures land in SweepRow::error.
std::vector<SweepRow> sweep_decoherence(SweepAxis axis, const std::vector<double>& values,
                                        const PhysicalConfig& config, const SweepOptions& options);

/// Hawking temperature of the asymptotic ring profile at its first sonic point.
double ring_hawking_temperature(const PhysicalConfig& config);

}  // namespace abh
