#include "abh/characteristics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "abh/quadrature.hpp"

namespace abh {
namespace {

using Region = LineProfile::Region;

constexpr double kRtol = 1e-13;
constexpr double kAtol = 1e-13;
constexpr double kEventTol = 1e-12;

struct State {
  double x;
  double log_amp;
};

struct Switch {
  double t;
  Region from;
  Region to;
};

double region_shape(Region r, double x, const LineProfile& p) {
  switch (r) {
    case Region::inner_left: return p.v_min();
    case Region::outer_right: return p.v_max();
    case Region::transition: return 1.0 + p.kappa() * x;
  }
  return 1.0;
}

State rhs(double t, const State& y, Region r, CharBranch b, const LineProfile& p) {
  const double s = p.sigma_at(t);
  const double sign = b == CharBranch::left ? -1.0 : 1.0;
  State d;
  d.x = s * region_shape(r, y.x, p) + sign;
  d.log_amp = (b == CharBranch::right && r == Region::transition) ? -s * p.kappa() : 0.0;
  return d;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  State y;
  double err;  // scaled error norm
};

StepResult dp_step(double t, const State& y, double h, Region r, CharBranch b, const LineProfile& p) {
  auto add = [](const State& base, double h, std::initializer_list<std::pair<double, State>> terms) {
    State out = base;
    for (const auto& [w, k] : terms) {
      out.x += h * w * k.x;
      out.log_amp += h * w * k.log_amp;
    }
    return out;
  };
  const State k1 = rhs(t, y, r, b, p);
  const State k2 = rhs(t + c2 * h, add(y, h, {{a21, k1}}), r, b, p);
  const State k3 = rhs(t + c3 * h, add(y, h, {{a31, k1}, {a32, k2}}), r, b, p);
  const State k4 = rhs(t + c4 * h, add(y, h, {{a41, k1}, {a42, k2}, {a43, k3}}), r, b, p);
  const State k5 = rhs(t + c5 * h, add(y, h, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}), r, b, p);
  const State k6 =
      rhs(t + h, add(y, h, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}), r, b, p);
  const State y5 = add(y, h, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
  const State k7 = rhs(t + h, y5, r, b, p);
  const State err =
      add(State{0.0, 0.0}, h, {{e1, k1}, {e3, k3}, {e4, k4}, {e5, k5}, {e6, k6}, {e7, k7}});
  const double sx = kAtol + kRtol * std::max(std::abs(y.x), std::abs(y5.x));
  const double sa = kAtol + kRtol * std::max(std::abs(y.log_amp), std::abs(y5.log_amp));
  return {y5, std::max(std::abs(err.x) / sx, std::abs(err.log_amp) / sa)};
}

bool inside(Region r, double x, double a) {
  switch (r) {
    case Region::inner_left: return x <= -a;
    case Region::outer_right: return x >= a;
    case Region::transition: return x >= -a && x <= a;
  }
  return false;
}

// Region to use when starting at x, moving in time direction `dir`.
Region start_region(double x, double t, double dir, CharBranch b, const LineProfile& p) {
  const double a = p.a();
  if (x < -a) return Region::inner_left;
  if (x > a) return Region::outer_right;
  if (x > -a && x < a) return Region::transition;
  const double speed = dir * rhs(t, State{x, 0.0}, Region::transition, b, p).x;
  if (x == a) return speed > 0 ? Region::outer_right : Region::transition;
  return speed < 0 ? Region::inner_left : Region::transition;
}

Region neighbour(Region r, double x, double a) {
  if (r == Region::transition) return x > a ? Region::outer_right : Region::inner_left;
  return Region::transition;
}

State integrate(State y, double t0, double t1, CharBranch b, const LineProfile& p,
                std::vector<Switch>* switches, Region* final_region = nullptr) {
  if (t0 < 0 || t1 < 0) throw NumericError("characteristics are defined for t >= 0");
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  Region region = start_region(y.x, t0, dir, b, p);
  double t = t0;
  double h = dir * std::min(std::abs(t1 - t0), 0.05 * p.tau());
  const double a = p.a();
  int guard = 0;
  while (dir * (t1 - t) > 0) {
    if (++guard > 10000000) throw NumericError("characteristic integration exceeded step budget");
    if (dir * (t + h - t1) > 0) h = t1 - t;
    const StepResult s = dp_step(t, y, h, region, b, p);
    if (!(s.err <= 1.0)) {
      if (!std::isfinite(s.err)) throw NumericError("characteristic integration diverged");
      h *= std::max(0.2, 0.9 * std::pow(s.err, -0.2));
      if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t))) {
        throw NumericError("characteristic step size underflow");
      }
      continue;
    }
    if (!inside(region, s.y.x, a)) {
      // Locate the interface crossing by bisecting the step length.
      double lo = 0.0, hi = 1.0;
      while ((hi - lo) * std::abs(h) > kEventTol) {
        const double mid = 0.5 * (lo + hi);
        if (inside(region, dp_step(t, y, mid * h, region, b, p).y.x, a)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      State at = dp_step(t, y, lo * h, region, b, p).y;
      const Region next = neighbour(region, region == Region::transition ? s.y.x : 0.0, a);
      // A long step can jump the whole transition region; the boundary hit first
      // is fixed by where the step started.
      if (region == Region::inner_left) {
        at.x = -a;
      } else if (region == Region::outer_right) {
        at.x = a;
      } else {
        at.x = s.y.x > a ? a : -a;
      }
      const double t_cross = t + lo * h;
      if (switches) switches->push_back({t_cross, region, next});
      region = next;
      y = at;
      t = t_cross;
      continue;
    }
    t += h;
    y = s.y;
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(s.err, 1e-10), -0.2)));
  }
  if (final_region) *final_region = region;
  return y;
}

double drift_integral(double t, const LineProfile& p, double sign) {
  if (!(t >= 0)) throw NumericError("time must be >= 0");
  if (t == 0.0) return 0.0;
  const auto f = [&](double s) {
    return (1.0 + sign * p.sigma_at(s)) * std::exp(-p.kappa() * p.accumulated(s));
  };
  QuadratureOptions o;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-14;
  return integrate_piecewise(f, 0.0, t, 5.0 * p.tau(), o).value;
}

void check_stays_inside(double x0, double t, CharBranch b, const LineProfile& p) {
  if (std::abs(x0) > p.a()) {
    throw RegionExitError("initial point outside the transition region", 0.0);
  }
  std::vector<Switch> sw;
  integrate(State{x0, 0.0}, 0.0, t, b, p, &sw);
  if (!sw.empty()) {
    throw RegionExitError("characteristic leaves |x| <= a at t = " + std::to_string(sw.front().t),
                          sw.front().t);
  }
}

double sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

const char* to_string(CharBranch b) { return b == CharBranch::left ? "left" : "right"; }

const char* to_string(Region r) {
  switch (r) {
    case Region::inner_left: return "inner";
    case Region::transition: return "transition";
    case Region::outer_right: return "outer";
  }
  return "unknown";
}

double left_drift_integral(double t, const LineProfile& p) { return drift_integral(t, p, -1.0); }
double right_drift_integral(double t, const LineProfile& p) { return drift_integral(t, p, 1.0); }

double stretched_time(double t, const LineProfile& p) {
  if (!(t >= 0)) throw NumericError("time must be >= 0");
  if (t == 0.0) return 0.0;
  const auto f = [&](double s) { return std::exp(-p.kappa() * p.accumulated(s)); };
  QuadratureOptions o;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-14;
  return integrate_piecewise(f, 0.0, t, 5.0 * p.tau(), o).value;
}

double left_characteristic(double x0, double t, const LineProfile& p) {
  check_stays_inside(x0, t, CharBranch::left, p);
  return std::exp(p.kappa() * p.accumulated(t)) * (x0 - left_drift_integral(t, p));
}

CharacteristicPoint right_characteristic(double x0, double t, const LineProfile& p) {
  check_stays_inside(x0, t, CharBranch::right, p);
  const double kf = p.kappa() * p.accumulated(t);
  return {std::exp(kf) * (x0 + right_drift_integral(t, p)), std::exp(-kf)};
}

CharacteristicPoint forward_evolve(double x0, double t, CharBranch branch, const LineProfile& p) {
  const State y = integrate(State{x0, 0.0}, 0.0, t, branch, p, nullptr);
  return {y.x, std::exp(y.log_amp)};
}

CharacteristicMap trace_characteristic(double x, double t, CharBranch branch, const LineProfile& p) {
  std::vector<Switch> sw;
  Region at_zero = Region::transition;
  const State y = integrate(State{x, 0.0}, t, 0.0, branch, p, &sw, &at_zero);
  CharacteristicMap m;
  m.branch = branch;
  m.x0 = y.x;
  m.amplitude_factor = std::exp(-y.log_amp);
  if (t == 0.0) at_zero = p.region(x);
  m.region_history.push_back({at_zero, 0.0});
  for (auto it = sw.rbegin(); it != sw.rend(); ++it) m.region_history.push_back({it->from, it->t});
  return m;
}

double asymptotic_left_x0(double x, double t, const LineProfile& p, MatchConvention convention) {
  const double a = p.a();
  const double f = p.accumulated(t);
  if (x > a) return a * std::exp((x + t - f * p.v_max() - a) / a);
  if (x < -a) {
    const double shift = convention == MatchConvention::symmetric ? a : -a;
    return -a * std::exp(-(x + t - f * p.v_min() + shift) / a);
  }
  return x * std::exp(-p.kappa() * t);
}

double interface_time(double x0, const LineProfile& p) {
  if (!(x0 > 0 && x0 <= p.a())) throw NumericError("interface time needs 0 < x0 <= a");
  return std::log(p.a() / x0) / p.kappa();
}

std::pair<double, double> entanglement_boundary(double t, const LineProfile& p) {
  if (!(t >= 0)) throw NumericError("time must be >= 0");
  const double xp = p.a() * (1.0 + p.kappa() * p.accumulated(t));
  return {-xp, xp};
}

double entanglement_onset_time(double x, const LineProfile& p) {
  const double target = std::abs(x);
  if (target <= p.a()) {
    throw RegimeError("|x| <= a: the boundary starts at +-a, onset is t = 0 by convention");
  }
  if (!(p.kappa() > 0)) throw RegimeError("flat profile: the boundary never moves");
  const auto g = [&](double t) { return entanglement_boundary(t, p).second - target; };
  double lo = 0.0, hi = p.tau();
  while (g(hi) < 0) hi *= 2.0;
  const double tol = 1e-10 * p.tau();
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::complex<double> mode_function(double k, double x, double t, const LineProfile& p) {
  if (k == 0.0) throw NumericError("mode function normalization is singular at k = 0");
  using C = std::complex<double>;
  const double x0 = trace_characteristic(x, t, CharBranch::left, p).x0;
  const double norm = 1.0 / std::sqrt(2.0 * std::abs(k));
  const C phase = std::exp(C(0.0, k * x0));
  if (k < 0 || t == 0.0) return norm * phase;
  const auto integrand = [&](double s, bool imag) {
    const double arg = -2.0 * k * stretched_time(s, p);
    const double amp = std::exp(-p.kappa() * p.accumulated(s));
    return amp * (imag ? std::sin(arg) : std::cos(arg));
  };
  QuadratureOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  const double piece = std::min(p.tau(), kPi / (2.0 * k));
  const double re = integrate_piecewise([&](double s) { return integrand(s, false); }, 0.0, t, piece, o).value;
  const double im = integrate_piecewise([&](double s) { return integrand(s, true); }, 0.0, t, piece, o).value;
  return norm * phase * (1.0 - C(0.0, 2.0 * k) * C(re, im));
}

double retarded_green(double x, double t, double xp, double tp, const LineProfile& p) {
  if (t < 0 || tp < 0) throw NumericError("times must be >= 0");
  if (!(t > tp)) return 0.0;
  const double l = trace_characteristic(x, t, CharBranch::left, p).x0;
  const double lp = trace_characteristic(xp, tp, CharBranch::left, p).x0;
  const double r = trace_characteristic(x, t, CharBranch::right, p).x0;
  const double rp = trace_characteristic(xp, tp, CharBranch::right, p).x0;
  return 0.25 * (sgn(l - lp) - sgn(r - rp));
}

std::vector<FanSample> characteristic_fan(const std::vector<double>& x0s, double t_max, int n_t,
                                          CharBranch branch, const LineProfile& p) {
  if (n_t < 1 || !(t_max > 0)) throw ConfigError("fan needs t_max > 0 and at least one step");
  std::vector<FanSample> out;
  for (double x0 : x0s) {
    State y{x0, 0.0};
    double t = 0.0;
    out.push_back({0.0, x0, p.region(x0), branch});
    for (int i = 1; i <= n_t; ++i) {
      const double t_next = t_max * i / n_t;
      y = integrate(y, t, t_next, branch, p, nullptr);
      t = t_next;
      out.push_back({t, y.x, p.region(y.x), branch});
    }
  }
  return out;
}

}  // namespace abh
