#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "abh/correlations.hpp"
#include "abh/environment.hpp"
#include "abh/profile.hpp"

namespace abh {

/// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Two independent standard normals keyed by (seed, realization) and counted by
/// (step, site). Deterministic regardless of evaluation order.
std::array<double, 2> gaussian_pair(std::uint64_t seed, std::uint64_t realization,
                                    std::uint64_t step, std::uint64_t site);

/// Periodic uniform lattice carrying phi and Pi = d_t phi + v d_x phi.
struct LatticeState {
  std::vector<double> x;
  std::vector<double> field;
  std::vector<double> momentum;
  double spacing = 0.0;
  double time = 0.0;
  std::uint64_t step_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t realization_id = 0;
  double reference_norm = 0.0;  // set on the first step; used by the instability check
};

/// n sites on [origin, origin + length), fields zero.
LatticeState make_lattice(int n, double length, double origin, std::uint64_t seed = 0,
                          std::uint64_t realization = 0);

/// v(x, t).
using VelocityField = std::function<double(double, double)>;

/// Largest dt allowed by dt <= 0.5 h / max(1 + |v|) at the state's time.
double max_stable_dt(const LatticeState& state, const VelocityField& velocity);
double max_stable_dt(const LatticeState& state, const LineProfile& profile);

/// Variance of the per-site momentum kick hbar N(0) dt / h; zero without coupling.
double noise_increment_variance(double dt, double spacing, const EnvironmentSpec& env);

/// One RK4 update of phi' = Pi - v D phi, Pi' = -D(v Pi) + L phi (centered second-order
/// differences), followed by memoryless damping e^{-lambda^2 dt} on Pi and a white-noise
/// kick. Throws ConfigError when dt violates the stability bound and NumericError when
/// the field norm blows up.
void step(LatticeState& state, double dt, const VelocityField& velocity, const EnvironmentSpec& env);
void step(LatticeState& state, double dt, const LineProfile& profile, const EnvironmentSpec& env);

/// 1/2 sum h (Pi^2 + (D_+ phi)^2): conserved by the semi-discrete flat system.
double lattice_energy(const LatticeState& state);

/// The noise kicks a step would inject (no state change).
std::vector<double> sample_noise(const LatticeState& state, double dt, const EnvironmentSpec& env);

struct EnsembleConfig {
  int sites = 512;
  double length = 25.6;
  double dt = 0.01;
  int realizations = 2000;
  int batches = 10;
  double cutoff_k = 6.0;  // Gaussian UV cutoff of the initial spectrum
  std::uint64_t seed = 20240611;
  double target_peak_error = 0.0;  // 0 = no requirement
};

struct MonteCarloResult {
  CorrelationGrid grid;           // method = monte_carlo, std_error per sample
  double x1_site = 0.0;           // lattice site used for the probe
  double peak_location = 0.0;     // from the full ensemble, parabolic refinement
  double peak_stat_error = 0.0;   // spread of batch peak locations / sqrt(batches)
  double discretization_error = 0.0;  // lattice spacing
  std::vector<double> batch_peaks;
  int realizations = 0;
  bool target_met = true;  // false: partial result, achieved error reported above
};

/// Monte-Carlo <Pi_L(x1) Pi_L(x2)> at time t. Thermal initial data at temperature T0
/// (mode-wise Gaussian, spectrum k coth(k / 2T0) e^{-(k/k_c)^2}), transported by
/// d_t phi_L + (v - 1) d_x phi_L = 0 with third-order upwind-biased differences and RK4;
/// Pi_L = d_x phi_L by fourth-order central differences.
/// Coupling adds relaxation at rate lambda^2/2 and white noise of strength hbar N(0)/2.
MonteCarloResult estimate_correlation(const EnsembleConfig& config, double x1, double x2_min,
                                      double x2_max, double t, double temperature,
                                      const LineProfile& profile, const EnvironmentSpec& env);

}  // namespace abh
