#pragma once

// Dormand-Prince 5(4) with Hairer's continuous extension.
// The right-hand side has signature bool(double t, const State& y, State& dy);
// returning false marks y as outside the chart, which rejects the step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "systolic/error.hpp"

namespace systolic::ode {

struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_initial = 0.0;  // 0: pick from the initial derivative
  double h_max = 0.0;      // 0: unbounded
  double h_min = 1e-14;
  std::size_t max_steps = 5'000'000;
};

template <std::size_t N>
using State = std::array<double, N>;

/// One accepted step with its dense-output polynomial.
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  State<N> y0{};
  State<N> y1{};
  std::array<State<N>, 5> rc{};

  double t1() const { return t0 + h; }

  State<N> at(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    }
    return y;
  }
};

namespace detail {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
struct Stages {
  std::array<State<N>, 7> k;
  State<N> y5;
  State<N> err;
};

// Seven stages (FSAL: k[0] must already hold f(t, y)). Returns false if any
// stage evaluation left the chart.
template <std::size_t N, class Rhs>
bool attempt(Rhs& f, double t, const State<N>& y, double h, Stages<N>& st) {
  auto& k = st.k;
  State<N> tmp;
  auto combo = [&](auto... terms) {
    for (std::size_t i = 0; i < N; ++i) {
      double acc = y[i];
      ((acc += h * terms.first * k[terms.second][i]), ...);
      tmp[i] = acc;
    }
  };
  using P = std::pair<double, int>;
  combo(P{a21, 0});
  if (!f(t + c2 * h, tmp, k[1])) return false;
  combo(P{a31, 0}, P{a32, 1});
  if (!f(t + c3 * h, tmp, k[2])) return false;
  combo(P{a41, 0}, P{a42, 1}, P{a43, 2});
  if (!f(t + c4 * h, tmp, k[3])) return false;
  combo(P{a51, 0}, P{a52, 1}, P{a53, 2}, P{a54, 3});
  if (!f(t + c5 * h, tmp, k[4])) return false;
  combo(P{a61, 0}, P{a62, 1}, P{a63, 2}, P{a64, 3}, P{a65, 4});
  if (!f(t + h, tmp, k[5])) return false;
  combo(P{a71, 0}, P{a73, 2}, P{a74, 3}, P{a75, 4}, P{a76, 5});
  st.y5 = tmp;
  if (!f(t + h, st.y5, k[6])) return false;
  for (std::size_t i = 0; i < N; ++i) {
    st.err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                     e7 * k[6][i]);
  }
  return true;
}

}  // namespace detail

/// Fifth-order solution after a single step of size h from (t, y); used to
/// polish event times without the interpolation error of the dense output.
template <std::size_t N, class Rhs>
bool single_step(Rhs&& f, double t, const State<N>& y, double h, State<N>& out) {
  detail::Stages<N> st;
  if (!f(t, y, st.k[0])) return false;
  if (h == 0.0) {
    out = y;
    return true;
  }
  if (!detail::attempt<N>(f, t, y, h, st)) return false;
  out = st.y5;
  return true;
}

/// Integrate from t0 towards t_end (t_end > t0). After every accepted step the
/// observer is called with the step; returning false stops the integration.
/// Returns the final time reached.
template <std::size_t N, class Rhs, class Observer>
double integrate(Rhs&& f, double t0, const State<N>& y_init, double t_end, const Options& opt,
                 Observer&& observer) {
  using detail::Stages;
  Stages<N> st;
  State<N> y = y_init;
  double t = t0;
  if (!f(t, y, st.k[0])) throw NumericalFailure("ode: initial state outside the chart");

  auto scale = [&](const State<N>& a, const State<N>& b, std::size_t i) {
    return opt.atol + opt.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
  };

  double h = opt.h_initial;
  if (h <= 0.0) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = scale(y, y, i);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (st.k[0][i] / sc) * (st.k[0][i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, 1e-2 * (t_end - t0));
  }
  if (opt.h_max > 0.0) h = std::min(h, opt.h_max);

  DenseStep<N> step;
  std::size_t n_steps = 0;
  bool last_rejected = false;
  while (t < t_end) {
    if (++n_steps > opt.max_steps) throw NumericalFailure("ode: step budget exhausted");
    if (t + h > t_end) h = t_end - t;
    if (h < opt.h_min) throw NumericalFailure("ode: step size underflow");

    if (!detail::attempt<N>(f, t, y, h, st)) {
      h *= 0.2;
      last_rejected = true;
      continue;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double q = st.err[i] / scale(y, st.y5, i);
      err += q * q;
    }
    err = std::sqrt(err / N);
    if (!std::isfinite(err)) {
      h *= 0.2;
      last_rejected = true;
      continue;
    }
    const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    if (err > 1.0) {
      h *= std::max(0.2, fac);
      last_rejected = true;
      continue;
    }

    step.t0 = t;
    step.h = h;
    step.y0 = y;
    step.y1 = st.y5;
    const auto& k = st.k;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = st.y5[i] - y[i];
      const double bspl = h * k[0][i] - ydiff;
      step.rc[0][i] = y[i];
      step.rc[1][i] = ydiff;
      step.rc[2][i] = bspl;
      step.rc[3][i] = ydiff - h * k[6][i] - bspl;
      step.rc[4][i] = h * (detail::d1 * k[0][i] + detail::d3 * k[2][i] + detail::d4 * k[3][i] +
                           detail::d5 * k[4][i] + detail::d6 * k[5][i] + detail::d7 * k[6][i]);
    }
    t += h;
    y = st.y5;
    st.k[0] = st.k[6];
    if (!observer(static_cast<const DenseStep<N>&>(step))) return t;

    double grow = std::min(5.0, fac);
    if (last_rejected) grow = std::min(grow, 1.0);
    last_rejected = false;
    h *= grow;
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
  }
  return t;
}

}  // namespace systolic::ode
