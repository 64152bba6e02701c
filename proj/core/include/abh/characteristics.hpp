#pragma once

#include <complex>
#include <vector>

#include "abh/error.hpp"
#include "abh/profile.hpp"

namespace abh {

enum class CharBranch { left, right };
const char* to_string(CharBranch branch);
const char* to_string(LineProfile::Region region);

/// Raised when a closed-form characteristic leaves the transition region before t.
class RegionExitError : public RegimeError {
 public:
  RegionExitError(const std::string& what, double exit_time)
      : RegimeError(what), exit_time_(exit_time) {}
  double exit_time() const noexcept { return exit_time_; }

 private:
  double exit_time_;
};

struct RegionVisit {
  LineProfile::Region region;
  double entry_time;
};

struct CharacteristicMap {
  CharBranch branch = CharBranch::left;
  std::vector<RegionVisit> region_history;  // forward in time, first entry at t = 0
  double x0 = 0.0;
  /// exp(-kappa int sigma) over the time spent in |x| <= a (right branch; 1 for left).
  double amplitude_factor = 1.0;
};

struct CharacteristicPoint {
  double x = 0.0;
  double amplitude_factor = 1.0;
};

/// int_0^t (1 - sigma(s)) exp(-kappa F(s)) ds, F = tau ln cosh(s/tau).
double left_drift_integral(double t, const LineProfile& p);
/// int_0^t (1 + sigma(s)) exp(-kappa F(s)) ds.
double right_drift_integral(double t, const LineProfile& p);
/// Xi(t) = int_0^t exp(-kappa F(s)) ds.
double stretched_time(double t, const LineProfile& p);

/// Closed-form left characteristic inside |x| <= a:
/// x(t) = e^{kappa F}(x0 - int_0^t (1 - sigma) e^{-kappa F}).
double left_characteristic(double x0, double t, const LineProfile& p);
/// Closed-form right characteristic inside |x| <= a, with amplitude e^{-kappa F(t)}.
CharacteristicPoint right_characteristic(double x0, double t, const LineProfile& p);

/// Integrate dx/dt = v -/+ 1 forward from (x0, 0) to t across all regions.
CharacteristicPoint forward_evolve(double x0, double t, CharBranch branch, const LineProfile& p);
/// Trace (x, t) back to t = 0.
CharacteristicMap trace_characteristic(double x, double t, CharBranch branch, const LineProfile& p);

/// Sign convention for the long-time matched left foot point on x < -a.
enum class MatchConvention {
  symmetric,  // x0 = -a exp(-(x + t - f v_min + a)/a), mirror of the x > a form
  verbatim    // x0 = -a exp(-(x + t - f v_min - a)/a)
};

/// Long-time (t >> tau) matched left foot point: x e^{-kappa t} inside,
/// a exp((x + t - f v_max - a)/a) for x > a, and the x < -a form per convention.
double asymptotic_left_x0(double x, double t, const LineProfile& p,
                          MatchConvention convention = MatchConvention::symmetric);

/// Time at which x0 e^{kappa t} reaches a: kappa^-1 ln(a / x0), 0 < x0 <= a.
double interface_time(double x0, const LineProfile& p);

/// x+-(t) = +-a (1 + kappa tau ln cosh(t/tau)).
std::pair<double, double> entanglement_boundary(double t, const LineProfile& p);
/// Root of x+(t) = |x| for |x| > a.
double entanglement_onset_time(double x, const LineProfile& p);

/// u_k(x, t) = e^{i k x0_L} / sqrt(2|k|) {1 - Theta(k) 2 i |k| int_0^t e^{-2 i k Xi(s) - kappa F(s)} ds},
/// with x0_L the traced left foot point. k < 0 is a pure left-mover.
std::complex<double> mode_function(double k, double x, double t, const LineProfile& p);

/// G = Theta(t - t') [phi(x,t), phi(x',t')] (times i, with the dk/2pi measure):
/// 1/4 [sgn(l - l') - sgn(r - r')], l and r the traced left and right foot points.
double retarded_green(double x, double t, double xp, double tp, const LineProfile& p);

struct FanSample {
  double t, x;
  LineProfile::Region region;
  CharBranch branch;
};
/// Forward characteristics from each x0, sampled at n_t + 1 equally spaced times.
std::vector<FanSample> characteristic_fan(const std::vector<double>& x0s, double t_max, int n_t,
                                          CharBranch branch, const LineProfile& p);

}  // namespace abh
