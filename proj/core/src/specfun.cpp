#include "abh/specfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "abh/error.hpp"

namespace abh {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
// Above this, Ei uses its asymptotic expansion; the smallest term there is ~e^-40.
constexpr double kEiAsymptotic = 40.0;
// Si/Ci: power series below, continued fraction above.
constexpr double kSiSeriesMax = 2.0;

double si_series(double x) {
  const double x2 = x * x;
  double term = x;  // x^(2k+1) / (2k+1)!
  double sum = x;
  for (int k = 1; k < 100; ++k) {
    term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
    const double add = term / (2.0 * k + 1.0);
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum)) break;
  }
  return sum;
}

// Modified Lentz on the continued fraction for E1(ix); x > 0.
double si_continued_fraction(double x) {
  using C = std::complex<double>;
  C b(1.0, x);
  C c(1.0 / kTiny, 0.0);
  C d = 1.0 / b;
  C h = d;
  for (int i = 2; i < 10000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const C del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) break;
  }
  h *= C(std::cos(x), -std::sin(x));
  return std::numbers::pi / 2 + h.imag();
}

// Sum_{k>=1} x^k / (k k!), all terms positive for x > 0.
double ei_tail_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 500; ++k) {
    term *= x / k;
    const double add = term / k;
    sum += add;
    if (add < kEps * sum) break;
  }
  return sum;
}

// (1/x) Sum k!/x^k, truncated at the smallest term; valid for x >= 40.
double ei_asymptotic_scaled(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * k / x;
    if (next > term) break;
    term = next;
    sum += term;
    if (term < kEps * sum) break;
  }
  return sum / x;
}

// e^x E1(x) by continued fraction, x > 1.
double e1_cf_scaled(double x) {
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double e1_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 500; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < kEps * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

double shi_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int k = 1; k < 500; ++k) {
    term *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
    const double add = term / (2.0 * k + 1.0);
    sum += add;
    if (add < kEps * sum) break;
  }
  return sum;
}

// Sum_{k>=1} x^(2k) / (2k (2k)!)
double chi_tail_series(double x) {
  const double x2 = x * x;
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 500; ++k) {
    term *= x2 / ((2.0 * k - 1.0) * (2.0 * k));
    const double add = term / (2.0 * k);
    sum += add;
    if (add < kEps * sum) break;
  }
  return sum;
}

}  // namespace

double si(double x) {
  if (x < 0) return -si(-x);
  if (x == 0) return 0.0;
  if (std::isinf(x)) return std::numbers::pi / 2;
  return x <= kSiSeriesMax ? si_series(x) : si_continued_fraction(x);
}

double expint_e1(double x) {
  if (!(x > 0)) throw NumericError("E1 requires x > 0");
  if (x <= 1.0) return e1_series(x);
  return std::exp(-x) * e1_cf_scaled(x);
}

double scaled_e1(double x) {
  if (!(x > 0)) throw NumericError("E1 requires x > 0");
  if (x <= 1.0) return std::exp(x) * e1_series(x);
  return e1_cf_scaled(x);
}

double expint_ei(double x) {
  if (x == 0) throw NumericError("Ei is singular at 0");
  if (x < 0) return -expint_e1(-x);
  if (x <= kEiAsymptotic) return kEulerGamma + std::log(x) + ei_tail_series(x);
  return std::exp(x) * ei_asymptotic_scaled(x);
}

double scaled_ei(double x) {
  if (!(x > 0)) throw NumericError("scaled Ei requires x > 0");
  if (x <= kEiAsymptotic) return std::exp(-x) * (kEulerGamma + std::log(x) + ei_tail_series(x));
  return ei_asymptotic_scaled(x);
}

double shi(double x) {
  if (x < 0) return -shi(-x);
  if (x == 0) return 0.0;
  if (x <= kEiAsymptotic) return shi_series(x);
  return 0.5 * (expint_ei(x) + expint_e1(x));
}

double chi(double x) {
  if (!(x > 0)) throw NumericError("Chi requires x > 0 (logarithmic singularity at 0)");
  if (x <= kEiAsymptotic) return kEulerGamma + std::log(x) + chi_tail_series(x);
  return 0.5 * (expint_ei(x) - expint_e1(x));
}

double stable_shi_chi_combo(double a, double b, double x) {
  if (x < 0) throw NumericError("stable_shi_chi_combo requires x >= 0");
  if (x == 0) return 0.0;
  if (x < 1.0) {
    const double s = shi(x), c = chi(x), ch = std::cosh(x), sh = std::sinh(x);
    return a * (s * ch - c * sh) + b * (s * sh - c * ch);
  }
  const double g1 = scaled_ei(x);
  const double g2 = scaled_e1(x);
  return 0.5 * a * (g1 + g2) + 0.5 * b * (g2 - g1);
}

}  // namespace abh
