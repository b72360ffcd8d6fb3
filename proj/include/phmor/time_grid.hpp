#pragma once

#include <utility>

#include "phmor/errors.hpp"
#include "phmor/linalg.hpp"

namespace phmor {

/// Uniform time grid on [t_begin, t_end] with n_steps intervals.
class TimeGrid {
 public:
  TimeGrid(double t_begin, double t_end, Index n_steps)
      : t_begin_(t_begin), t_end_(t_end), n_steps_(n_steps) {
    if (!(t_end > t_begin)) throw InvalidParameter("time grid: t_end must exceed t_begin");
    if (n_steps < 1) throw InvalidParameter("time grid: n_steps must be positive");
  }

  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  Index n_steps() const { return n_steps_; }
  Index n_points() const { return n_steps_ + 1; }
  double dt() const { return (t_end_ - t_begin_) / static_cast<double>(n_steps_); }

  double time(Index k) const { return k == n_steps_ ? t_end_ : t_begin_ + static_cast<double>(k) * dt(); }
  double midpoint_time(Index k) const { return t_begin_ + (static_cast<double>(k) + 0.5) * dt(); }

  Vector times() const {
    Vector t(n_points());
    for (Index k = 0; k < n_points(); ++k) t[k] = time(k);
    return t;
  }

  bool operator==(const TimeGrid& other) const {
    return t_begin_ == other.t_begin_ && t_end_ == other.t_end_ &&
           n_steps_ == other.n_steps_;
  }

 private:
  double t_begin_, t_end_;
  Index n_steps_;
};

/// State samples on a time grid; row k is the state at grid.time(k).
struct Trajectory {
  TimeGrid grid;
  Matrix states;

  Trajectory(TimeGrid g, Matrix s) : grid(std::move(g)), states(std::move(s)) {
    if (states.rows() != grid.n_points())
      throw ShapeMismatch("trajectory: row count does not match grid");
    if (!states.allFinite())
      throw InvalidParameter("trajectory: non-finite state sample");
  }

  Index dim() const { return states.cols(); }
  Vector state(Index k) const { return states.row(k).transpose(); }
};

}  // namespace phmor
