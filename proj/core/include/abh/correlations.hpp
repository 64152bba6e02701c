#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "abh/characteristics.hpp"
#include "abh/profile.hpp"

namespace abh {

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

/// Pi = d_t phi + v d_x phi.
double momentum_of_field(double dphi_dt, double dphi_dx, double velocity);

enum class CorrelationMethod { closed_form, mode_sum_oracle, monte_carlo, homogeneous };
const char* to_string(CorrelationMethod m);

struct CorrelationSample {
  double x2 = 0.0;
  double value = 0.0;
  double std_error = 0.0;  // Monte-Carlo only
};

struct CorrelationGrid {
  double t = 0.0;
  double x1 = 0.0;
  double temperature = 0.0;
  CorrelationMethod method = CorrelationMethod::closed_form;
  std::vector<CorrelationSample> samples;  // sorted by x2
};

struct PeakOptions {
  double threshold = 3.0;
  double exclusion_half_width = 3.0;  // in position units
  double neighbour_ratio = 0.5;       // |v[i +- 1]| / |v[i]| must exceed this
};

struct PeakReport {
  double location = 0.0;
  double height = 0.0;
  double background = 0.0;
  double contrast = 0.0;
  bool present = false;
  bool interior = false;  // argmax is a smooth interior local maximum
};

/// Needs at least 16 samples. present iff contrast > threshold and the argmax
/// is a smooth interior maximum.
PeakReport detect_peak(const CorrelationGrid& grid, const PeakOptions& options = {});

// ---------------------------------------------------------------------------
// Homogeneous-region form.

/// Spectral measure of the k-integral: k^{3/2}/sqrt(2) literal, or k from dk/(2k) k^2
/// summed over both signs of k.
enum class SpectralMeasure { as_printed, canonical };
enum class Regulator { exponential, gaussian };

struct RegulatedValue {
  std::complex<double> value;
  std::complex<double> error_estimate;
};

/// int_0^inf k^p coth(beta k / 2) e^{-i k d} dk, defined by a regulator e^{-eps k}
/// (or e^{-(eps k)^2}) and Richardson extrapolation eps -> 0. beta may be +inf.
RegulatedValue thermal_mode_integral(double p, double d, double beta,
                                     Regulator regulator = Regulator::exponential);

/// Homogeneous two-point function of Pi_L for separation dx = x1 - x2. Inside the
/// transition region (region == transition) the slope kappa and sigma enter via
/// d = dx e^{-kappa F(t)}; elsewhere kappa -> 0.
RegulatedValue corr_homogeneous(double dx, double t, double beta, const LineProfile& profile,
                                LineProfile::Region region = LineProfile::Region::outer_right,
                                SpectralMeasure measure = SpectralMeasure::as_printed,
                                Regulator regulator = Regulator::exponential);

// ---------------------------------------------------------------------------
// Matched closed form across the horizon.

/// Entanglement region test: x1 in (-x+(t), -a), x2 in (a, x+(t)), or mirrored.
bool in_entanglement_pair(double x1, double x2, double t, const LineProfile& profile);

/// -(pi/beta)^2 X1' X2' cosech^2(pi (X2 - X1) / beta) with the matched foot points X,
/// evaluated in log space. beta = +inf gives -X1' X2' / (X2 - X1)^2.
/// Throws RegimeError outside the entanglement region.
double corr_closed_form(double x1, double x2, double t, double beta, const LineProfile& profile,
                        MatchConvention convention = MatchConvention::symmetric);

/// Literal display form evaluated in log space (includes its e^2 factor).
double corr_closed_form_printed(double x1, double x2, double t, double beta,
                                const LineProfile& profile);

struct ModeSumResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double truncation_bound = 0.0;  // relative k-tail bound
  double d1 = 0.0, d2 = 0.0;      // d_t X + v d_x X at each point
  double separation = 0.0;        // X1 - X2
};

/// Independent evaluation: foot points from the characteristic maps, Pi per
/// d_t + v d_x by finite differences, and the k-integral of k coth(beta k/2) cos(k D)
/// by regulated quadrature. Points beyond x+(t) use the outer characteristic.
ModeSumResult corr_mode_sum_oracle(double x1, double x2, double t, double beta,
                                   const LineProfile& profile,
                                   MatchConvention convention = MatchConvention::symmetric);

/// Composite used for grids: closed form inside the entanglement region, |homogeneous|
/// outside.
double correlation_value(double x1, double x2, double t, double beta, const LineProfile& profile,
                         MatchConvention convention = MatchConvention::symmetric);

CorrelationGrid correlation_grid(double x1, const std::vector<double>& x2s, double t, double beta,
                                 const LineProfile& profile,
                                 CorrelationMethod method = CorrelationMethod::closed_form,
                                 MatchConvention convention = MatchConvention::symmetric);

/// x2 such that the matched foot points mirror each other: X2 = -X1.
double mirrored_peak_position(double x1, double t, const LineProfile& profile,
                              MatchConvention convention = MatchConvention::symmetric);

// ---------------------------------------------------------------------------
// Open-system relative correction per mode.

enum class CrossTermReading { symmetric, literal };
const char* to_string(CrossTermReading r);

struct OpenCorrection {
  double e_r = 0.0;
  double overlap = 0.0;  // h(k, t) = int_0^t cos^2(k (Xi(t) - Xi(s))) ds
  std::optional<std::string> warning;
};

/// e_r = lambda^2 h(k,t) |c_D + 2 T0 / (k coth(k / (2 T0)))| with c_D = 2 (symmetric
/// reading) or 1 + e^{-i k dx} (literal). Xi is the stretched time of the transition
/// region. Warns when T0 is far from 100 T_H or lambda is not small.
OpenCorrection open_correction_er(double k, double t, double lambda, double temperature,
                                  const LineProfile& profile,
                                  CrossTermReading reading = CrossTermReading::symmetric,
                                  double dx = 0.0);

}  // namespace abh
