#include "abh/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace abh {
namespace {

// Kronrod 15-point abscissae and weights; every second abscissa (odd index) is a
// Gauss 7-point node.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const RealFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  const double value = kronrod * half;
  double error = std::abs((kronrod - gauss) * half);
  if (!std::isfinite(value)) {
    throw NumericError("non-finite integrand value on [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]");
  }
  // Round-off floor.
  error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
  return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b, double tol) {
  QuadratureOptions options;
  options.abs_tol = tol;
  return integrate_adaptive(f, a, b, options);
}

QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    const QuadratureOptions& options) {
  if (!(options.abs_tol > 0) && !(options.rel_tol > 0)) {
    throw NumericError("quadrature tolerance must be positive");
  }
  if (a == b) return {0.0, 0.0, 1};
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double total_error = first.error;
  double magnitude = std::abs(first.value);  // sum of |segment values|
  std::size_t evaluations = 15;
  int intervals = 1;
  // Requests below the round-off floor are clamped to it.
  auto target = [&] {
    return std::max({options.abs_tol, options.rel_tol * std::abs(total),
                     100.0 * std::numeric_limits<double>::epsilon() * magnitude});
  };
  while (total_error > target()) {
    if (intervals >= options.max_intervals) {
      throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) +
                                ", " + std::to_string(b) + "]: error estimate " +
                                std::to_string(total_error),
                            {total, total_error, evaluations});
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {
      // Interval can no longer be split; accept what we have.
      heap.push(worst);
      break;
    }
    const Segment left = gk15(f, worst.a, mid);
    const Segment right = gk15(f, mid, worst.b);
    evaluations += 30;
    ++intervals;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    magnitude += std::abs(left.value) + std::abs(right.value) - std::abs(worst.value);
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to drop accumulated cancellation in the running totals.
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, evaluations};
}

QuadratureResult integrate_to_infinity(const RealFunction& f, double a,
                                       const QuadratureOptions& options) {
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = a + u / one_minus;
    const double jac = 1.0 / (one_minus * one_minus);
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx * jac;
  };
  return integrate_adaptive(mapped, 0.0, 1.0, options);
}

QuadratureResult integrate_fixed(const RealFunction& f, double a, double b, std::size_t pieces) {
  if (pieces == 0) throw NumericError("fixed quadrature needs at least one piece");
  const double width = (b - a) / static_cast<double>(pieces);
  QuadratureResult total;
  for (std::size_t i = 0; i < pieces; ++i) {
    const double left = a + width * static_cast<double>(i);
    const double right = (i + 1 == pieces) ? b : left + width;
    const auto seg = gk15(f, left, right);
    total.value += seg.value;
    total.error_estimate += seg.error;
  }
  total.evaluations = 15 * pieces;
  return total;
}

Extrapolation wynn_epsilon(std::span<const double> s) {
  const std::size_t n = s.size();
  if (n == 0) return {0.0, std::numeric_limits<double>::infinity()};
  if (n < 3) return {s.back(), n == 2 ? std::abs(s[1] - s[0]) : std::abs(s[0])};
  // eps[k] columns; keep previous two columns.
  std::vector<double> prev(n + 1, 0.0);      // eps_{-1}
  std::vector<double> curr(s.begin(), s.end());  // eps_0
  double best = s.back();
  double best_err = std::abs(s[n - 1] - s[n - 2]);
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    bool ok = true;
    for (std::size_t i = 0; i + k < n; ++i) {
      const double diff = curr[i + 1] - curr[i];
      if (diff == 0.0) {
        ok = false;
        break;
      }
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    if (!ok) break;
    prev = std::move(curr);
    curr = std::move(next);
    if (k % 2 == 0 && curr.size() >= 2) {
      const double est = curr.back();
      const double err = std::abs(curr.back() - curr[curr.size() - 2]);
      if (std::isfinite(est) && err < best_err) {
        best = est;
        best_err = err;
      }
    }
  }
  return {best, best_err};
}

QuadratureResult integrate_piecewise(const RealFunction& f, double a, double b, double piece,
                                     const QuadratureOptions& options) {
  if (!(piece > 0)) throw NumericError("piecewise quadrature needs a positive piece length");
  if (a == b) return {0.0, 0.0, 1};
  const double sign = b > a ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / piece));
  const std::size_t n = std::max<std::size_t>(count, 1);
  const double width = (hi - lo) / static_cast<double>(n);
  QuadratureOptions inner = options;
  inner.abs_tol = options.abs_tol / static_cast<double>(n);
  QuadratureResult total;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = lo + width * static_cast<double>(i);
    const double right = (i + 1 == n) ? hi : left + width;
    const auto r = integrate_adaptive(f, left, right, inner);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.evaluations += r.evaluations;
  }
  total.value *= sign;
  return total;
}

QuadratureResult integrate_oscillatory(const RealFunction& f, double a, double period,
                                       const QuadratureOptions& options, int max_segments,
                                       int min_segments) {
  if (!(period > 0)) throw NumericError("oscillatory quadrature needs a positive period");
  QuadratureOptions inner = options;
  inner.abs_tol = options.abs_tol * 0.1;
  std::vector<double> partial;
  double sum = 0.0;
  double quad_err = 0.0;
  std::size_t evaluations = 0;
  double last = 0.0;
  int stable = 0;
  for (int k = 0; k < max_segments; ++k) {
    const auto piece = integrate_adaptive(f, a + k * period, a + (k + 1) * period, inner);
    sum += piece.value;
    quad_err += piece.error_estimate;
    evaluations += piece.evaluations;
    partial.push_back(sum);
    if (static_cast<int>(partial.size()) >= std::max(min_segments, 8)) {
      // Use a sliding window so the table stays small.
      const std::size_t window = std::min<std::size_t>(partial.size(), 40);
      const auto ex = wynn_epsilon(std::span<const double>(partial).last(window));
      const double target = std::max(options.abs_tol, options.rel_tol * std::abs(ex.value));
      if (std::abs(ex.value - last) <= target && ex.error_estimate <= target) {
        if (++stable >= 2) return {ex.value, ex.error_estimate + quad_err, evaluations};
      } else {
        stable = 0;
      }
      last = ex.value;
      if (std::abs(piece.value) <= 0.01 * target && std::abs(partial[partial.size() - 2] - sum) <= 0.01 * target) {
        return {sum, quad_err, evaluations};
      }
    }
  }
  throw QuadratureError("oscillatory quadrature did not converge", {last, quad_err, evaluations});
}

}  // namespace abh
