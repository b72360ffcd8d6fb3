#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

#include "phmor/errors.hpp"
#include "phmor/linalg.hpp"

namespace phmor {

/// Time-dependent input u(t). Three flavors: identically zero, a sinusoid
/// u(t) = amplitude * sin(2*pi*frequency*t + phase) broadcast to all input
/// channels, or tabulated samples with linear interpolation.
class InputSignal {
 public:
  static InputSignal zero(Index dim) {
    InputSignal s;
    s.dim_ = dim;
    s.data_ = ZeroSignal{};
    return s;
  }

  static InputSignal sinusoid(double amplitude, double frequency_hz,
                              double phase = 0.0, Index dim = 1) {
    InputSignal s;
    s.dim_ = dim;
    s.data_ = Sinusoid{amplitude, frequency_hz, phase};
    return s;
  }

  /// `values` holds one sample per row, one column per input channel.
  static InputSignal tabulated(std::vector<double> times, Matrix values) {
    if (static_cast<Index>(times.size()) != values.rows())
      throw ShapeMismatch("tabulated signal: times/values length mismatch");
    if (times.size() < 2)
      throw InvalidParameter("tabulated signal needs at least two samples");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw InvalidParameter("tabulated signal times must be strictly increasing");
    InputSignal s;
    s.dim_ = values.cols();
    s.data_ = Tabulated{std::move(times), std::move(values)};
    return s;
  }

  Index dim() const { return dim_; }

  bool is_zero() const { return std::holds_alternative<ZeroSignal>(data_); }

  /// True if the signal can be evaluated everywhere on [t_begin, t_end].
  bool covers(double t_begin, double t_end) const {
    if (const auto* tab = std::get_if<Tabulated>(&data_)) {
      const double slack = 1e-12 * (tab->times.back() - tab->times.front());
      return t_begin >= tab->times.front() - slack &&
             t_end <= tab->times.back() + slack;
    }
    return true;
  }

  Vector operator()(double t) const {
    if (std::holds_alternative<ZeroSignal>(data_)) return Vector::Zero(dim_);
    if (const auto* sin = std::get_if<Sinusoid>(&data_)) {
      const double w = 2.0 * std::numbers::pi * sin->frequency_hz;
      return Vector::Constant(dim_, sin->amplitude * std::sin(w * t + sin->phase));
    }
    const auto& tab = std::get<Tabulated>(data_);
    return interpolate(tab, t);
  }

 private:
  struct ZeroSignal {};
  struct Sinusoid {
    double amplitude, frequency_hz, phase;
  };
  struct Tabulated {
    std::vector<double> times;
    Matrix values;  // one row per sample
  };

  static Vector interpolate(const Tabulated& tab, double t) {
    const double lo = tab.times.front(), hi = tab.times.back();
    const double slack = 1e-12 * (hi - lo);
    if (t < lo - slack || t > hi + slack)
      throw GridMismatch("tabulated signal evaluated outside its time range");
    const double tc = std::clamp(t, lo, hi);
    auto it = std::upper_bound(tab.times.begin(), tab.times.end(), tc);
    if (it == tab.times.begin()) ++it;
    if (it == tab.times.end()) --it;
    const auto hi_idx = static_cast<Index>(it - tab.times.begin());
    const auto lo_idx = hi_idx - 1;
    const double t0 = tab.times[lo_idx], t1 = tab.times[hi_idx];
    const double w = (tc - t0) / (t1 - t0);
    return (1.0 - w) * tab.values.row(lo_idx).transpose() +
           w * tab.values.row(hi_idx).transpose();
  }

  Index dim_ = 0;
  std::variant<ZeroSignal, Sinusoid, Tabulated> data_;
};

}  // namespace phmor
