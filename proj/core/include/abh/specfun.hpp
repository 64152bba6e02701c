#pragma once

namespace abh {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
/// max Si(x), attained at x = pi.
inline constexpr double kSiSupremum = 1.8519370519824661703610533701579913;

/// Sine integral Si(x) = int_0^x sin t / t dt.
double si(double x);
/// Hyperbolic sine integral Shi(x) = int_0^x sinh t / t dt.
double shi(double x);
/// Hyperbolic cosine integral; throws NumericError for x <= 0.
double chi(double x);

/// E1(x) = int_x^inf e^-t / t dt, x > 0.
double expint_e1(double x);
/// Ei(x) principal value, x != 0.
double expint_ei(double x);
/// e^-x Ei(x), finite for all x > 0 (no overflow).
double scaled_ei(double x);
/// e^x E1(x), x > 0.
double scaled_e1(double x);

/// a (Shi cosh - Chi sinh)(x) + b (Shi sinh - Chi cosh)(x) without forming
/// cosh/sinh. Returns 0 at x = 0.
double stable_shi_chi_combo(double a, double b, double x);

}  // namespace abh
