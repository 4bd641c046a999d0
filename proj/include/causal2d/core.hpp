#pragma once

// Geometry of two-dimensional Minkowski spacetime: events, the causal order,
// rectangular computational windows and continuous fields sampled on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "causal2d/errors.hpp"

namespace causal2d {

struct NullCoords {
  double u;
  double v;
};

struct InertialCoords {
  double t;
  double x;
};

/// u = x + t, v = x - t.
constexpr NullCoords to_null(double t, double x) noexcept { return {x + t, x - t}; }

constexpr InertialCoords from_null(double u, double v) noexcept { return {(u - v) / 2, (u + v) / 2}; }

/// A point of the plane, remembering which chart it was given in.
class Event {
 public:
  enum class Chart { inertial, null };

  static constexpr Event inertial(double t, double x) noexcept { return Event(Chart::inertial, t, x); }
  static constexpr Event null(double u, double v) noexcept { return Event(Chart::null, u, v); }

  constexpr Chart chart() const noexcept { return chart_; }

  constexpr double t() const noexcept { return chart_ == Chart::inertial ? a_ : from_null(a_, b_).t; }
  constexpr double x() const noexcept { return chart_ == Chart::inertial ? b_ : from_null(a_, b_).x; }
  constexpr double u() const noexcept { return chart_ == Chart::null ? a_ : to_null(a_, b_).u; }
  constexpr double v() const noexcept { return chart_ == Chart::null ? b_ : to_null(a_, b_).v; }

 private:
  constexpr Event(Chart c, double a, double b) noexcept : chart_(c), a_(a), b_(b) {}
  Chart chart_;
  double a_;
  double b_;
};

/// p precedes q in the causal order: dt >= |dx|.
///
/// Inertial-chart pairs are compared in (t, x); anything involving a null-chart
/// event is compared in null coordinates, where the same relation reads
/// du >= 0 and dv <= 0.
inline bool causal_leq(const Event& p, const Event& q) noexcept {
  if (p.chart() == Event::Chart::inertial && q.chart() == Event::Chart::inertial) {
    return q.t() - p.t() >= std::abs(q.x() - p.x());
  }
  return q.u() - p.u() >= 0 && q.v() - p.v() <= 0;
}

/// Null-coordinate form of the order for raw (u, v) pairs.
inline bool causal_leq_null(double pu, double pv, double qu, double qv) noexcept {
  return qu - pu >= 0 && qv - pv <= 0;
}

struct Interval {
  double lo;
  double hi;

  double span() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double s) const noexcept { return s >= lo && s <= hi; }
};

/// Finite window [u_min, u_max] x [v_min, v_max] standing in for the whole plane.
struct Rect {
  double u_min;
  double u_max;
  double v_min;
  double v_max;

  static Rect make(double u_min, double u_max, double v_min, double v_max) {
    Rect r{u_min, u_max, v_min, v_max};
    r.validate();
    return r;
  }

  void validate() const {
    if (!(std::isfinite(u_min) && std::isfinite(u_max) && std::isfinite(v_min) && std::isfinite(v_max)))
      throw InvalidArgument("rect bounds must be finite");
    if (!(u_min < u_max) || !(v_min < v_max)) throw InvalidArgument("rect requires u_min < u_max and v_min < v_max");
  }

  Interval u_range() const noexcept { return {u_min, u_max}; }
  Interval v_range() const noexcept { return {v_min, v_max}; }

  bool contains(double u, double v) const noexcept { return u >= u_min && u <= u_max && v >= v_min && v <= v_max; }
};

/// Uniform nodes on a Rect; node (i, j) sits at (u_i, v_j).
class Grid2D {
 public:
  Grid2D(Rect rect, std::size_t nu, std::size_t nv) : rect_(rect), nu_(nu), nv_(nv) {
    rect_.validate();
    if (nu < 2 || nv < 2) throw InvalidArgument("grid needs at least 2 nodes per axis");
  }

  static Grid2D square(Rect rect, std::size_t n) { return Grid2D(rect, n, n); }

  const Rect& rect() const noexcept { return rect_; }
  std::size_t nu() const noexcept { return nu_; }
  std::size_t nv() const noexcept { return nv_; }
  std::size_t size() const noexcept { return nu_ * nv_; }

  double du() const noexcept { return (rect_.u_max - rect_.u_min) / static_cast<double>(nu_ - 1); }
  double dv() const noexcept { return (rect_.v_max - rect_.v_min) / static_cast<double>(nv_ - 1); }

  double u(std::size_t i) const noexcept {
    return i + 1 == nu_ ? rect_.u_max : rect_.u_min + static_cast<double>(i) * du();
  }
  double v(std::size_t j) const noexcept {
    return j + 1 == nv_ ? rect_.v_max : rect_.v_min + static_cast<double>(j) * dv();
  }

  std::vector<double> u_nodes() const {
    std::vector<double> out(nu_);
    for (std::size_t i = 0; i < nu_; ++i) out[i] = u(i);
    return out;
  }
  std::vector<double> v_nodes() const {
    std::vector<double> out(nv_);
    for (std::size_t j = 0; j < nv_; ++j) out[j] = v(j);
    return out;
  }

  bool operator==(const Grid2D& o) const noexcept {
    return nu_ == o.nu_ && nv_ == o.nv_ && rect_.u_min == o.rect_.u_min && rect_.u_max == o.rect_.u_max &&
           rect_.v_min == o.rect_.v_min && rect_.v_max == o.rect_.v_max;
  }

 private:
  Rect rect_;
  std::size_t nu_;
  std::size_t nv_;
};

/// Trapezoid weights for n uniform nodes with spacing h.
inline std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

/// Continuous field on a Rect given by node samples, bilinear in between.
/// values are row-major: values[j * nu + i] = f(u_i, v_j).
class SampledField2D {
 public:
  SampledField2D(Grid2D grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InvalidArgument("field has " + std::to_string(values_.size()) + " values, grid needs " +
                            std::to_string(grid_.size()));
    for (double x : values_)
      if (!std::isfinite(x)) throw InvalidArgument("field values must be finite");
  }

  template <class F>
  static SampledField2D sample(const Grid2D& grid, F&& f) {
    std::vector<double> vals(grid.size());
    for (std::size_t j = 0; j < grid.nv(); ++j) {
      const double v = grid.v(j);
      for (std::size_t i = 0; i < grid.nu(); ++i) vals[j * grid.nu() + i] = f(grid.u(i), v);
    }
    return SampledField2D(grid, std::move(vals));
  }

  const Grid2D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(std::size_t i, std::size_t j) const noexcept { return values_[j * grid_.nu() + i]; }

  double max_abs() const noexcept {
    double m = 0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }

  /// Bilinear interpolation; exact at nodes.
  double operator()(double u, double v) const {
    const Rect& r = grid_.rect();
    if (!r.contains(u, v)) throw InvalidArgument("field evaluated outside its rect");
    auto locate = [](double s, double lo, double h, std::size_t n) {
      double pos = (s - lo) / h;
      auto k = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(n - 2)));
      return std::pair{k, std::clamp(pos - static_cast<double>(k), 0.0, 1.0)};
    };
    auto [i, a] = locate(u, r.u_min, grid_.du(), grid_.nu());
    auto [j, b] = locate(v, r.v_min, grid_.dv(), grid_.nv());
    const double f00 = at(i, j), f10 = at(i + 1, j), f01 = at(i, j + 1), f11 = at(i + 1, j + 1);
    return (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
  }

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Continuous function of one variable as (coordinate, value) samples with
/// linear interpolation. Coordinates strictly increasing.
class SampledFunction1D {
 public:
  SampledFunction1D() = default;
  SampledFunction1D(std::vector<double> coords, std::vector<double> values)
      : coords_(std::move(coords)), values_(std::move(values)) {
    if (coords_.size() != values_.size() || coords_.size() < 2)
      throw InvalidArgument("1-D function needs at least two (coordinate, value) samples");
    for (std::size_t k = 1; k < coords_.size(); ++k)
      if (!(coords_[k] > coords_[k - 1])) throw InvalidArgument("1-D sample coordinates must increase strictly");
  }

  std::span<const double> coords() const noexcept { return coords_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return coords_.size(); }
  Interval domain() const noexcept { return {coords_.front(), coords_.back()}; }

  double operator()(double s) const {
    if (s < coords_.front() || s > coords_.back()) throw InvalidArgument("1-D function evaluated outside its domain");
    auto it = std::upper_bound(coords_.begin(), coords_.end(), s);
    std::size_t k = it == coords_.end() ? coords_.size() - 2 : static_cast<std::size_t>(it - coords_.begin()) - 1;
    const double a = (s - coords_[k]) / (coords_[k + 1] - coords_[k]);
    return (1 - a) * values_[k] + a * values_[k + 1];
  }

  /// max |f| over the samples.
  double max_abs() const noexcept {
    double m = 0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  std::vector<double> coords_;
  std::vector<double> values_;
};

}  // namespace causal2d
