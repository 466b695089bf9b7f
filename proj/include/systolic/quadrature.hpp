#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature, scalar or small-vector
// valued, plus the square-root endpoint substitution used for integrands that
// vanish like sqrt(s - s_end) at a root of r(s) = kappa.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace systolic::quad {

template <class V>
struct Result {
  V value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Component access so the same kernel serves double and std::array<double, N>.
inline constexpr std::size_t width(const double*) { return 1; }
template <std::size_t N>
constexpr std::size_t width(const std::array<double, N>*) { return N; }
inline double& at(double& v, std::size_t) { return v; }
inline double at(const double& v, std::size_t) { return v; }
template <std::size_t N>
double& at(std::array<double, N>& v, std::size_t i) { return v[i]; }
template <std::size_t N>
double at(const std::array<double, N>& v, std::size_t i) { return v[i]; }

template <class V>
struct Segment {
  double a, b;
  V value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// One G7K15 panel with the QUADPACK error heuristic applied per component.
template <class V, class F>
Segment<V> gk15(F& f, double a, double b) {
  constexpr std::size_t n = width(static_cast<V*>(nullptr));
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<V, 15> fv;
  fv[7] = f(center);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  Segment<V> seg{a, b, V{}, 0.0};
  for (std::size_t c = 0; c < n; ++c) {
    double kron = kWgk[7] * at(fv[7], c);
    double gauss = kWg[3] * at(fv[7], c);
    double kabs = std::abs(kron);
    for (std::size_t j = 0; j < 7; ++j) {
      const double pair = at(fv[j], c) + at(fv[14 - j], c);
      kron += kWgk[j] * pair;
      kabs += kWgk[j] * (std::abs(at(fv[j], c)) + std::abs(at(fv[14 - j], c)));
      if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * kron;
    double asc = kWgk[7] * std::abs(at(fv[7], c) - mean);
    for (std::size_t j = 0; j < 7; ++j) {
      asc += kWgk[j] * (std::abs(at(fv[j], c) - mean) + std::abs(at(fv[14 - j], c) - mean));
    }
    kron *= half;
    asc *= std::abs(half);
    kabs *= std::abs(half);
    double err = std::abs((kron - gauss * half));
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double round_floor = 50.0 * 2.220446049250313e-16 * kabs;
    err = std::max(err, round_floor);
    at(seg.value, c) = kron;
    seg.error = std::max(seg.error, err);
  }
  return seg;
}

}  // namespace detail

/// Integrate f over [a, b] until the summed error estimate drops below
/// max(abs_tol, rel_tol * |I|) (max-norm over components for vector values).
template <class V = double, class F>
Result<V> adaptive(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                   std::size_t max_segments = 4000) {
  constexpr std::size_t n = detail::width(static_cast<V*>(nullptr));
  Result<V> out;
  if (a == b) return out;
  std::priority_queue<detail::Segment<V>> heap;
  heap.push(detail::gk15<V>(f, a, b));
  out.evaluations = 15;
  auto totals = [&]() {
    V sum{};
    double err = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      const auto& s = copy.top();
      for (std::size_t c = 0; c < n; ++c) detail::at(sum, c) += detail::at(s.value, c);
      err += s.error;
      copy.pop();
    }
    return std::pair{sum, err};
  };
  double err_sum = heap.top().error;
  V val_sum = heap.top().value;
  while (true) {
    double scale = 0.0;
    for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(detail::at(val_sum, c)));
    if (err_sum <= std::max(abs_tol, rel_tol * scale)) break;
    if (heap.size() >= max_segments) {
      out.converged = false;
      break;
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      out.converged = false;
      break;
    }
    auto left = detail::gk15<V>(f, worst.a, mid);
    auto right = detail::gk15<V>(f, mid, worst.b);
    out.evaluations += 30;
    err_sum += left.error + right.error - worst.error;
    for (std::size_t c = 0; c < n; ++c) {
      detail::at(val_sum, c) +=
          detail::at(left.value, c) + detail::at(right.value, c) - detail::at(worst.value, c);
    }
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the segments to avoid drift from incremental updates.
  auto [sum, err] = totals();
  out.value = sum;
  out.error = err;
  return out;
}

/// Integral over [a, b] of a function with square-root behaviour at one or
/// both endpoints: the interval is split at its midpoint and each half is
/// mapped through s = end +/- u^2, which makes the integrand smooth in u.
template <class F>
Result<double> sqrt_endpoints(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0) {
  Result<double> out;
  if (!(b > a)) return out;
  const double mid = 0.5 * (a + b);
  const double umax = std::sqrt(mid - a);
  auto left = adaptive([&](double u) { return 2.0 * u * f(a + u * u); }, 0.0, umax, 0.5 * abs_tol,
                       rel_tol);
  auto right = adaptive([&](double u) { return 2.0 * u * f(b - u * u); }, 0.0, umax,
                        0.5 * abs_tol, rel_tol);
  out.value = left.value + right.value;
  out.error = left.error + right.error;
  out.evaluations = left.evaluations + right.evaluations;
  out.converged = left.converged && right.converged;
  return out;
}

/// Fixed Gauss-Legendre rule of order n on [-1, 1] (computed once per n).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(c + h * nodes[i]);
    return sum * h;
  }
};

const GaussLegendre& gauss_legendre_20();

}  // namespace systolic::quad
