#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

namespace canardkit {

template <std::size_t N>
using State = std::array<double, N>;

struct OdeOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  ///< 0 picks one automatically
  long max_steps = 1'000'000;
};

enum class OdeStatus { completed, stopped, step_underflow, max_steps, non_finite };
const char* to_string(OdeStatus s);

/// One accepted step together with its continuous extension.
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double t1 = 0.0;
  State<N> y0{};
  State<N> y1{};
  std::array<State<N>, 4> rcont{};  // Hairer's rcont2..rcont5
  double error_norm = 0.0;

  /// 4th-order interpolant on [t0, t1].
  State<N> at(double t) const {
    const double h = t1 - t0;
    const double th = h == 0.0 ? 0.0 : (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> out;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = y0[i] + th * (rcont[0][i] + th1 * (rcont[1][i] + th * (rcont[2][i] + th1 * rcont[3][i])));
    }
    return out;
  }
};

namespace detail {

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/// Dormand-Prince 5(4) with error-per-step control. `f(t, y, dydt)`,
/// `observer(const DenseStep<N>&) -> bool` (false stops), and
/// `project(State<N>&) -> bool` applied to each accepted state (true if it moved it).
template <std::size_t N, typename F, typename Observer, typename Project>
OdeStatus dopri5(F&& f, double t0, State<N>& y, double t_end, const OdeOptions& opt, Observer&& observer,
                 Project&& project) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  if (!(t_end > t0)) return OdeStatus::completed;
  State<N> k1, k2, k3, k4, k5, k6, k7, tmp, y1;
  f(t0, y, k1);
  if (!detail::all_finite(k1) || !detail::all_finite(y)) return OdeStatus::non_finite;

  auto scaled_norm = [&](const State<N>& v, const State<N>& ref) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::abs(ref[i]);
      s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / static_cast<double>(N));
  };

  double t = t0;
  double h = opt.initial_step;
  if (h <= 0.0) {
    const double d0 = scaled_norm(y, y);
    const double d1n = scaled_norm(k1, y);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  }
  h = std::min({h, opt.max_step, t_end - t0});

  for (long step = 0; step < opt.max_steps; ++step) {
    if (t_end - t <= 1e-14 * std::max(1.0, std::abs(t_end))) return OdeStatus::completed;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) return OdeStatus::step_underflow;
    const bool last = t + h >= t_end;
    if (last) h = t_end - t;

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    f(t + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i) {
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    f(t + h, y1, k7);

    State<N> err;
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    State<N> ref;
    for (std::size_t i = 0; i < N; ++i) ref[i] = std::max(std::abs(y[i]), std::abs(y1[i]));
    const double en = scaled_norm(err, ref);

    if (!std::isfinite(en) || !detail::all_finite(y1) || !detail::all_finite(k7)) {
      h *= 0.2;
      if (h < 1e-14 * std::max(1.0, std::abs(t))) return OdeStatus::non_finite;
      continue;
    }
    if (en > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      continue;
    }

    DenseStep<N> ds;
    ds.t0 = t;
    ds.t1 = t + h;
    ds.y0 = y;
    ds.y1 = y1;
    ds.error_norm = en;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      ds.rcont[0][i] = ydiff;
      ds.rcont[1][i] = bspl;
      ds.rcont[2][i] = ydiff - h * k7[i] - bspl;
      ds.rcont[3][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    t = last ? t_end : t + h;
    y = y1;
    if (project(y)) {
      f(t, y, k1);
    } else {
      k1 = k7;
    }
    if (!observer(static_cast<const DenseStep<N>&>(ds))) return OdeStatus::stopped;
    if (last) return OdeStatus::completed;

    const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h = std::min(h * fac, opt.max_step);
  }
  return OdeStatus::max_steps;
}

template <std::size_t N, typename F, typename Observer>
OdeStatus dopri5(F&& f, double t0, State<N>& y, double t_end, const OdeOptions& opt, Observer&& observer) {
  return dopri5<N>(std::forward<F>(f), t0, y, t_end, opt, std::forward<Observer>(observer),
                   [](State<N>&) { return false; });
}

}  // namespace canardkit
