#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "abh/error.hpp"

namespace abh {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

using RealFunction = std::function<double(double)>;

inline constexpr double kDefaultAbsTol = 1e-10;

/// Raised when adaptive subdivision runs out of budget. Carries the partial result.
class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, QuadratureResult partial)
      : NumericError(what), partial_(partial) {}
  const QuadratureResult& partial() const noexcept { return partial_; }

 private:
  QuadratureResult partial_;
};

struct QuadratureOptions {
  double abs_tol = kDefaultAbsTol;
  double rel_tol = 0.0;
  int max_intervals = 5000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Endpoint singularities are tolerated as long as they are integrable; the
/// integrand is never evaluated at a or b.
QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    double tol = kDefaultAbsTol);
QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    const QuadratureOptions& options);

/// Integral over [a, inf) via the map x = a + u / (1 - u). For integrands that
/// decay at least like 1/x^2 and are not oscillatory.
QuadratureResult integrate_to_infinity(const RealFunction& f, double a,
                                       const QuadratureOptions& options = {});

/// Integral over [a, inf) of a conditionally convergent oscillatory integrand.
/// The range is cut into segments of length `segment` (a half period works best);
/// the partial sums are accelerated with Wynn's epsilon algorithm. Convergence is
/// not tested before `min_segments` segments have been summed.
QuadratureResult integrate_oscillatory(const RealFunction& f, double a, double segment,
                                       const QuadratureOptions& options = {},
                                       int max_segments = 4000, int min_segments = 8);

/// Finite-range integral summed over consecutive pieces of length <= `piece`.
QuadratureResult integrate_piecewise(const RealFunction& f, double a, double b, double piece,
                                     const QuadratureOptions& options = {});

/// Non-adaptive composite 15-point Kronrod rule over `pieces` equal pieces. The result
/// is a smooth function of any parameter inside f; the error estimate is the summed
/// Kronrod-Gauss difference.
QuadratureResult integrate_fixed(const RealFunction& f, double a, double b, std::size_t pieces);

struct Extrapolation {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Wynn epsilon extrapolation of a sequence of partial sums.
Extrapolation wynn_epsilon(std::span<const double> partial_sums);

}  // namespace abh
