#include "abh/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "abh/error.hpp"
#include "abh/quadrature.hpp"

namespace abh {
namespace {

double reduce_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double hermite(double x0, double x1, double y0, double y1, double s0, double s1, double x) {
  const double h = x1 - x0;
  const double u = (x - x0) / h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * s0 + (-2 * u3 + 3 * u2) * y1 +
         (u3 - u2) * h * s1;
}

double null_integrand(const SpatialProfile& p, double x, NullBranch branch) {
  const double c = p.sound_speed(x);
  const double v = p.velocity(x);
  return 1.0 / (branch == NullBranch::u ? c + v : c - v);
}

std::vector<std::pair<double, double>> exclusion_windows(const SpatialProfile& p,
                                                         NullBranch branch, double epsilon) {
  std::vector<std::pair<double, double>> w;
  if (branch != NullBranch::v || !(epsilon > 0)) return w;
  for (double h : p.horizons) w.emplace_back(h - epsilon, h + epsilon);
  std::sort(w.begin(), w.end());
  return w;
}

}  // namespace

RingProfile::RingProfile(const PhysicalConfig& config) : config_(config) {
  validate(config_);
  tau_ = 0.05 * config_.period;
  k_sound_ = std::sqrt(2.0 * config_.n_ions * config_.ion_charge * config_.ion_charge /
                       (config_.ion_mass * std::pow(config_.radius, 3) * config_.period));
}

double RingProfile::v_min_at(double t) const {
  if (std::isinf(t)) return config_.v_min;
  const double v0 = config_.uniform_velocity();
  return config_.v_min + (v0 - config_.v_min) * std::exp(-(t * t) / (tau_ * tau_));
}

double RingProfile::v_max_at(double t) const {
  if (std::isinf(t)) return config_.v_max;
  const double v0 = config_.uniform_velocity();
  return config_.v_max + (v0 - config_.v_max) * std::exp(-(t * t) / (tau_ * tau_));
}

double RingProfile::velocity(double theta, double t) const {
  const double th = reduce_angle(theta);
  const double lo = v_min_at(t), hi = v_max_at(t);
  const double beta = 0.5 * (hi + lo), alpha = 0.5 * (hi - lo);
  const double th_h = config_.theta_h, g1 = config_.gamma1, g2 = config_.gamma2;
  if (th <= th_h - g1) return lo;
  if (th <= th_h + g1) return beta + alpha * (th - th_h) / g1;
  if (th <= kTwoPi - th_h - g2) return hi;
  if (th <= kTwoPi - th_h + g2) return beta - alpha * (th - kTwoPi + th_h) / g2;
  return lo;
}

double RingProfile::sound_speed(double theta, double t) const {
  return k_sound_ / std::sqrt(velocity(theta, t));
}

double RingProfile::sonic_velocity() const { return std::cbrt(k_sound_ * k_sound_); }

std::vector<double> RingProfile::breakpoints() const {
  const double th_h = config_.theta_h, g1 = config_.gamma1, g2 = config_.gamma2;
  return {th_h - g1, th_h + g1, kTwoPi - th_h - g2, kTwoPi - th_h + g2};
}

std::vector<double> RingProfile::horizons(double t) const {
  const auto b = breakpoints();
  const std::function<double(double)> f = [&](double th) {
    return velocity(th, t) - sound_speed(th, t);
  };
  std::vector<double> out;
  for (int ramp = 0; ramp < 2; ++ramp) {
    const double lo = b[2 * ramp], hi = b[2 * ramp + 1];
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) {
      out.push_back(lo);
    } else if ((flo < 0) != (fhi < 0) && fhi != 0.0) {
      out.push_back(bisect(f, lo, hi, 1e-12));
    } else if (fhi == 0.0) {
      out.push_back(hi);
    }
  }
  return out;
}

SpatialProfile RingProfile::snapshot(double t) const {
  SpatialProfile p;
  const RingProfile self = *this;
  p.velocity = [self, t](double th) { return self.velocity(th, t); };
  p.sound_speed = [self, t](double th) { return self.sound_speed(th, t); };
  p.breakpoints = breakpoints();
  p.horizons = horizons(t);
  p.lower = 0.0;
  p.upper = kTwoPi;
  return p;
}

double sigma(double t, double tau) { return std::tanh(t / tau); }

double sigma_accumulated(double t, double tau) {
  const double u = std::abs(t / tau);
  if (u < 1.0) {
    const double s = std::sinh(0.5 * u);
    return tau * std::log1p(2.0 * s * s);
  }
  return tau * (u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2);
}

LineProfile::LineProfile(double v_min, double v_max, double half_width, double tau)
    : v_min_(v_min), v_max_(v_max), a_(half_width), tau_(tau) {
  if (!(half_width > 0)) throw ConfigError("line profile: half-width a must be > 0");
  if (!(tau > 0)) throw ConfigError("line profile: tau must be > 0");
  if (v_min > v_max) throw ConfigError("profile extrema inverted: v_min > v_max");
  if (std::abs(v_min + v_max - 2.0) > 1e-12) {
    throw ConfigError("line profile: continuity requires v_min + v_max = 2 (c = 1)");
  }
  kappa_ = line_kappa(v_max, v_min, half_width);
}

LineProfile::Region LineProfile::region(double x) const {
  if (x < -a_) return Region::inner_left;
  if (x > a_) return Region::outer_right;
  return Region::transition;
}

double LineProfile::shape(double x) const {
  if (x < -a_) return v_min_;
  if (x > a_) return v_max_;
  return 1.0 + kappa_ * x;
}

double null_coordinate(const SpatialProfile& p, double x, NullBranch branch, double epsilon,
                       double x_ref) {
  if (x == x_ref) return 0.0;
  const double lo = std::min(x, x_ref), hi = std::max(x, x_ref);
  if (branch == NullBranch::v && !(epsilon > 0)) {
    for (double h : p.horizons) {
      if (h >= lo && h <= hi) {
        throw NumericError("x_v integrand singular at horizon " + std::to_string(h) +
                           "; supply an exclusion half-width");
      }
    }
  }
  const auto windows = exclusion_windows(p, branch, epsilon);
  std::vector<double> cuts{lo, hi};
  for (double b : p.breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  for (const auto& [wl, wr] : windows) {
    if (wl > lo && wl < hi) cuts.push_back(wl);
    if (wr > lo && wr < hi) cuts.push_back(wr);
  }
  std::sort(cuts.begin(), cuts.end());
  QuadratureOptions opts;
  opts.abs_tol = 1e-13;
  opts.rel_tol = 1e-13;
  double sum = 0.0;
  const auto f = [&](double s) { return null_integrand(p, s, branch); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    const bool skip = std::any_of(windows.begin(), windows.end(),
                                  [&](const auto& w) { return mid > w.first && mid < w.second; });
    if (skip) continue;
    sum += integrate_adaptive(f, a, b, opts).value;
  }
  return x >= x_ref ? sum : -sum;
}

NullCoordinateTable::NullCoordinateTable(const SpatialProfile& p, NullBranch branch,
                                         double epsilon, double tolerance)
    : epsilon_(epsilon) {
  if (branch == NullBranch::v && !(epsilon > 0) && !p.horizons.empty()) {
    throw NumericError("x_v integrand singular at horizon " + std::to_string(p.horizons.front()) +
                       "; supply an exclusion half-width");
  }
  windows_ = exclusion_windows(p, branch, epsilon);
  knots_ = {p.lower, p.upper};
  for (double b : p.breakpoints)
    if (b > p.lower && b < p.upper) knots_.push_back(b);
  for (const auto& [wl, wr] : windows_) {
    if (wl > p.lower && wl < p.upper) knots_.push_back(wl);
    if (wr > p.lower && wr < p.upper) knots_.push_back(wr);
  }
  std::sort(knots_.begin(), knots_.end());
  knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());

  const auto f = [&](double s) { return null_integrand(p, s, branch); };
  QuadratureOptions opts;
  opts.abs_tol = 0.1 * tolerance;
  const double max_width = (p.upper - p.lower) / 64.0;

  nodes_.push_back(knots_.front());
  values_.push_back(0.0);
  // Depth-first refinement keeps nodes in increasing order.
  std::function<void(double, double, double, double, double, int)> refine =
      [&](double a, double b, double ya, double sa, double sb, int depth) {
        const double mid = 0.5 * (a + b);
        const double ym = ya + integrate_adaptive(f, a, mid, opts).value;
        const double yb = ym + integrate_adaptive(f, mid, b, opts).value;
        const double pred = hermite(a, b, ya, yb, sa, sb, mid);
        if ((std::abs(pred - ym) <= tolerance && b - a <= max_width) || depth > 40) {
          nodes_.push_back(b);
          values_.push_back(yb);
          left_slope_.push_back(sa);
          right_slope_.push_back(sb);
          frozen_.push_back(0);
          return;
        }
        const double sm = f(mid);
        refine(a, mid, ya, sa, sm, depth + 1);
        refine(mid, b, values_.back(), sm, sb, depth + 1);
      };

  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double a = knots_[i], b = knots_[i + 1];
    const double mid = 0.5 * (a + b);
    const bool in_window = std::any_of(windows_.begin(), windows_.end(), [&](const auto& w) {
      return mid > w.first && mid < w.second;
    });
    if (in_window) {
      nodes_.push_back(b);
      values_.push_back(values_.back());
      left_slope_.push_back(0.0);
      right_slope_.push_back(0.0);
      frozen_.push_back(1);
      continue;
    }
    refine(a, b, values_.back(), f(a), f(b), 0);
  }
}

bool NullCoordinateTable::excluded(double x) const {
  return std::any_of(windows_.begin(), windows_.end(),
                     [&](const auto& w) { return x > w.first && x < w.second; });
}

double NullCoordinateTable::operator()(double x) const {
  if (x < nodes_.front() || x > nodes_.back()) {
    throw NumericError("null coordinate table queried outside its range");
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t i = (it == nodes_.begin()) ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (i + 1 >= nodes_.size()) i = nodes_.size() - 2;
  if (frozen_[i]) return values_[i];
  return hermite(nodes_[i], nodes_[i + 1], values_[i], values_[i + 1], left_slope_[i],
                 right_slope_[i], x);
}

double hawking_temperature(const SpatialProfile& p, double horizon, double hbar,
                           double k_boltzmann) {
  double room = 1e-2;
  for (double b : p.breakpoints) {
    const double d = std::abs(b - horizon);
    if (d > 0) room = std::min(room, 0.25 * d);
  }
  room = std::min({room, 0.25 * (horizon - p.lower), 0.25 * (p.upper - horizon)});
  if (!(room > 0)) throw NumericError("horizon sits on a profile breakpoint");
  const auto g = [&](double x) {
    const double v = p.velocity(x), c = p.sound_speed(x);
    return v * v - c * c;
  };
  constexpr int kLevels = 4;
  double table[kLevels][kLevels];
  double h = room;
  for (int i = 0; i < kLevels; ++i, h *= 0.5) {
    table[i][0] = (g(horizon + h) - g(horizon - h)) / (2.0 * h);
    double factor = 4.0;
    for (int j = 1; j <= i; ++j, factor *= 4.0) {
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
    }
  }
  const double slope = table[kLevels - 1][kLevels - 1];
  const double v = p.velocity(horizon);
  return hbar / (4.0 * kPi * v * k_boltzmann) * slope;
}

std::vector<double> hawking_temperature_ring(const RingProfile& profile, double t) {
  const auto snap = profile.snapshot(t);
  if (snap.horizons.empty()) throw RegimeError("ring profile has no sonic point");
  std::vector<double> out;
  for (double h : snap.horizons) {
    out.push_back(hawking_temperature(snap, h, profile.config().hbar,
                                      profile.config().k_boltzmann));
  }
  return out;
}

double hawking_temperature_line(double v_max, double v_min, double half_width) {
  if (!(half_width > 0)) throw ConfigError("half-width a must be > 0");
  return std::abs(v_max - v_min) / (2.0 * half_width) / kTwoPi;
}

}  // namespace abh
