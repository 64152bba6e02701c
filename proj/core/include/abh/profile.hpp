#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "abh/params.hpp"

namespace abh {

/// Velocity and sound speed along a 1D coordinate at a frozen instant, plus the
/// points where either is non-smooth and the sonic points.
struct SpatialProfile {
  std::function<double(double)> velocity;
  std::function<double(double)> sound_speed;
  std::vector<double> breakpoints;
  std::vector<double> horizons;
  double lower = 0.0;
  double upper = kTwoPi;
};

/// Five-branch ring profile with a Gaussian collapse from uniform flow.
class RingProfile {
 public:
  explicit RingProfile(const PhysicalConfig& config);

  const PhysicalConfig& config() const { return config_; }

  /// Extrema at time t: v_ext + (2 pi / T - v_ext) exp(-t^2 / tau^2).
  double v_min_at(double t) const;
  double v_max_at(double t) const;

  /// theta is reduced into [0, 2 pi). t = +inf gives the asymptotic profile.
  double velocity(double theta, double t) const;
  double asymptotic_velocity(double theta) const { return velocity(theta, kLate); }

  /// c = sqrt(2 n Q^2 / (m R^3)) with n = N / (v T); equals K / sqrt(v).
  double sound_speed(double theta, double t) const;
  /// K = sqrt(2 N Q^2 / (m R^3 T)).
  double sound_speed_constant() const { return k_sound_; }
  /// Velocity at which v = c.
  double sonic_velocity() const;

  /// Sonic points at time t (bisection to 1e-12 in theta).
  std::vector<double> horizons(double t) const;

  /// Ramp edges theta_H -/+ gamma1 and 2 pi - theta_H -/+ gamma2.
  std::vector<double> breakpoints() const;

  SpatialProfile snapshot(double t) const;

  static constexpr double kLate = std::numeric_limits<double>::infinity();

 private:
  PhysicalConfig config_;
  double tau_;
  double k_sound_;
};

/// sigma(t) = tanh(t / tau).
double sigma(double t, double tau);
/// int_0^t sigma = tau ln cosh(t / tau), evaluated without overflow or cancellation.
double sigma_accumulated(double t, double tau);

/// Line profile v = sigma(t) {v_min | 1 + kappa x | v_max} on x < -a | |x| <= a | x > a, c = 1.
class LineProfile {
 public:
  LineProfile(double v_min, double v_max, double half_width, double tau);

  enum class Region { inner_left = 0, transition = 1, outer_right = 2 };

  double a() const { return a_; }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  double tau() const { return tau_; }
  double kappa() const { return kappa_; }
  double delta_v() const { return v_max_ - v_min_; }
  double sigma_v() const { return v_max_ + v_min_; }

  Region region(double x) const;
  /// Profile shape without the time factor.
  double shape(double x) const;
  double velocity(double x, double t) const { return sigma(t, tau_) * shape(x); }
  double sigma_at(double t) const { return sigma(t, tau_); }
  double accumulated(double t) const { return sigma_accumulated(t, tau_); }

 private:
  double v_min_, v_max_, a_, tau_, kappa_;
};

enum class NullBranch { u, v };

/// x_u = int dx / (c + v) or x_v = int dx / (c - v) from x_ref to x. Windows of
/// half-width epsilon around horizons on the path are excluded from the integral.
/// With epsilon <= 0 a horizon on the path is an error (branch v only).
double null_coordinate(const SpatialProfile& profile, double x, NullBranch branch,
                       double epsilon = 0.0, double x_ref = 0.0);

/// Tabulated null coordinate over [profile.lower, profile.upper] with adaptive
/// cubic-Hermite interpolation. Inside an excluded window the value is frozen.
class NullCoordinateTable {
 public:
  NullCoordinateTable(const SpatialProfile& profile, NullBranch branch, double epsilon,
                      double tolerance = 1e-11);

  double operator()(double x) const;
  bool excluded(double x) const;
  /// Value at profile.upper minus value at profile.lower.
  double total() const { return values_.back() - values_.front(); }
  const std::vector<double>& nodes() const { return nodes_; }
  /// Non-smooth points and excluded-window edges, sorted.
  const std::vector<double>& knots() const { return knots_; }
  double epsilon() const { return epsilon_; }

 private:
  std::vector<double> nodes_, values_, left_slope_, right_slope_;
  std::vector<char> frozen_;  // per interval
  std::vector<double> knots_;
  std::vector<std::pair<double, double>> windows_;
  double epsilon_;
};

/// T_H = hbar / (4 pi v k_B) d(v^2 - c^2)/dx at a horizon, derivative by central
/// differences with Richardson extrapolation. The step stays inside the smooth
/// piece containing the horizon.
double hawking_temperature(const SpatialProfile& profile, double horizon, double hbar = 1.0,
                           double k_boltzmann = 1.0);
/// One signed temperature per sonic point, in horizon order.
std::vector<double> hawking_temperature_ring(const RingProfile& profile,
                                             double t = RingProfile::kLate);
/// |v_max - v_min| / (2 a) / (2 pi).
double hawking_temperature_line(double v_max, double v_min, double half_width);

}  // namespace abh
