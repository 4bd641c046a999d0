#pragma once

// Distributions realized as quadrature pairings <f, phi> against sampled
// fields, and weak derivatives obtained by moving derivatives onto the probe.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "causal2d/core.hpp"
#include "causal2d/errors.hpp"
#include "causal2d/testfn.hpp"

namespace causal2d {

/// Probe supports must stay this many grid cells inside the field's rect.
inline constexpr double kMarginCells = 2.0;

/// Default threshold for "zero as a distribution".
inline constexpr double kDefaultWeakTol = 1e-5;

inline void check_margin(const TestFunction2D& phi, const Grid2D& grid) {
  const Rect s = phi.support();
  const Rect& r = grid.rect();
  const double mu = kMarginCells * grid.du(), mv = kMarginCells * grid.dv();
  // a small relative slack absorbs round-off in lattice placement
  const double eps_u = 1e-12 * (r.u_max - r.u_min), eps_v = 1e-12 * (r.v_max - r.v_min);
  if (s.u_min < r.u_min + mu - eps_u || s.u_max > r.u_max - mu + eps_u || s.v_min < r.v_min + mv - eps_v ||
      s.v_max > r.v_max - mv + eps_v)
    throw MarginViolation("test function support [" + std::to_string(s.u_min) + ", " + std::to_string(s.u_max) +
                          "] x [" + std::to_string(s.v_min) + ", " + std::to_string(s.v_max) +
                          "] is not at least 2 cells inside the field rect");
}

namespace detail {

// Node index range [first, last] covering [lo, hi] on a uniform axis.
inline std::pair<std::size_t, std::size_t> node_span(double lo, double hi, double origin, double h, std::size_t n) {
  const double a = std::floor((lo - origin) / h), b = std::ceil((hi - origin) / h);
  const auto first = static_cast<std::size_t>(std::clamp(a, 0.0, static_cast<double>(n - 1)));
  const auto last = static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(n - 1)));
  return {first, last};
}

}  // namespace detail

/// Tensor-product trapezoidal quadrature of f * phi on f's own grid.
inline double pair(const SampledField2D& f, const TestFunction2D& phi) {
  const Grid2D& g = f.grid();
  check_margin(phi, g);
  const Rect s = phi.support();
  const auto [i0, i1] = detail::node_span(s.u_min, s.u_max, g.rect().u_min, g.du(), g.nu());
  const auto [j0, j1] = detail::node_span(s.v_min, s.v_max, g.rect().v_min, g.dv(), g.nv());
  const auto wu = trapezoid_weights(g.nu(), g.du());
  const auto wv = trapezoid_weights(g.nv(), g.dv());

  std::vector<double> a(i1 - i0 + 1), b(j1 - j0 + 1);
  double total = 0;
  for (const auto& term : phi.terms()) {
    for (std::size_t i = i0; i <= i1; ++i) a[i - i0] = wu[i] * term.u(g.u(i));
    for (std::size_t j = j0; j <= j1; ++j) b[j - j0] = wv[j] * term.v(g.v(j));
    double acc = 0;
    for (std::size_t j = j0; j <= j1; ++j) {
      if (b[j - j0] == 0) continue;
      double row = 0;
      for (std::size_t i = i0; i <= i1; ++i) row += a[i - i0] * f.at(i, j);
      acc += b[j - j0] * row;
    }
    total += acc;
  }
  return total;
}

/// Trapezoidal L1 norm of phi on a grid.
inline double l1_norm(const TestFunction2D& phi, const Grid2D& g) {
  const Rect s = phi.support();
  const auto [i0, i1] = detail::node_span(s.u_min, s.u_max, g.rect().u_min, g.du(), g.nu());
  const auto [j0, j1] = detail::node_span(s.v_min, s.v_max, g.rect().v_min, g.dv(), g.nv());
  const auto wu = trapezoid_weights(g.nu(), g.du());
  const auto wv = trapezoid_weights(g.nv(), g.dv());
  double acc = 0;
  for (std::size_t j = j0; j <= j1; ++j)
    for (std::size_t i = i0; i <= i1; ++i) acc += wu[i] * wv[j] * std::abs(phi(g.u(i), g.v(j)));
  return acc;
}

/// A distribution: a linear map from test functions to reals.
class WeakFunctional {
 public:
  enum class Kind { raw_field, weak_du, weak_dv, weak_mixed, difference, custom };

  WeakFunctional(Kind kind, std::function<double(const TestFunction2D&)> eval, double scale)
      : kind_(kind), eval_(std::move(eval)), scale_(scale) {}

  double operator()(const TestFunction2D& phi) const { return eval_(phi); }
  Kind kind() const noexcept { return kind_; }
  /// Magnitude of the underlying data, used to normalize residuals.
  double scale() const noexcept { return scale_; }

  friend WeakFunctional operator-(const WeakFunctional& a, const WeakFunctional& b) {
    return WeakFunctional(
        Kind::difference, [a, b](const TestFunction2D& phi) { return a(phi) - b(phi); },
        std::max(a.scale(), b.scale()));
  }

 private:
  Kind kind_;
  std::function<double(const TestFunction2D&)> eval_;
  double scale_;
};

inline std::string to_string(WeakFunctional::Kind k) {
  switch (k) {
    case WeakFunctional::Kind::raw_field: return "raw";
    case WeakFunctional::Kind::weak_du: return "weak_du";
    case WeakFunctional::Kind::weak_dv: return "weak_dv";
    case WeakFunctional::Kind::weak_mixed: return "weak_mixed";
    case WeakFunctional::Kind::difference: return "difference";
    case WeakFunctional::Kind::custom: return "custom";
  }
  return "unknown";
}

/// phi -> <f, phi>.
inline WeakFunctional as_functional(SampledField2D f) {
  auto fp = std::make_shared<const SampledField2D>(std::move(f));
  const double scale = fp->max_abs();
  return WeakFunctional(
      WeakFunctional::Kind::raw_field, [fp](const TestFunction2D& phi) { return pair(*fp, phi); }, scale);
}

/// phi -> -<f, d phi/du>.
inline WeakFunctional weak_du(SampledField2D f) {
  auto fp = std::make_shared<const SampledField2D>(std::move(f));
  const double scale = fp->max_abs();
  return WeakFunctional(
      WeakFunctional::Kind::weak_du, [fp](const TestFunction2D& phi) { return -pair(*fp, phi.derivative_u()); },
      scale);
}

/// phi -> -<f, d phi/dv>.
inline WeakFunctional weak_dv(SampledField2D f) {
  auto fp = std::make_shared<const SampledField2D>(std::move(f));
  const double scale = fp->max_abs();
  return WeakFunctional(
      WeakFunctional::Kind::weak_dv, [fp](const TestFunction2D& phi) { return -pair(*fp, phi.derivative_v()); },
      scale);
}

/// phi -> +<f, d^2 phi/du dv>; two sign flips cancel.
inline WeakFunctional weak_mixed(SampledField2D f) {
  auto fp = std::make_shared<const SampledField2D>(std::move(f));
  const double scale = fp->max_abs();
  return WeakFunctional(
      WeakFunctional::Kind::weak_mixed,
      [fp](const TestFunction2D& phi) { return pair(*fp, phi.derivative_u().derivative_v()); }, scale);
}

/// Finite family of probes standing in for "all test functions", each with its L1 mass.
class ProbeSet {
 public:
  ProbeSet(std::vector<TestFunction2D> probes, const Grid2D& grid, std::uint64_t seed = 0, std::string label = "")
      : probes_(std::move(probes)), seed_(seed), label_(std::move(label)) {
    if (probes_.empty()) throw InvalidArgument("probe set is empty");
    l1_.reserve(probes_.size());
    for (const auto& p : probes_) {
      check_margin(p, grid);
      l1_.push_back(l1_norm(p, grid));
    }
  }

  static double snap_to_node(double x, double lo, double h) { return lo + std::round((x - lo) / h) * h; }

  /// nu x nv tensor bumps on a regular lattice of centers. The default radius
  /// is a quarter of the axis span, so neighbouring supports overlap heavily and
  /// each probe spans enough nodes for the trapezoid rule to resolve it. Centers
  /// are spread evenly over the positions that keep the margin, then moved to
  /// the nearest grid node.
  static ProbeSet lattice(const Grid2D& grid, std::size_t nu, std::size_t nv, std::optional<double> radius = {},
                          std::uint64_t seed = 42) {
    if (nu == 0 || nv == 0) throw InvalidArgument("probe lattice needs at least one center per axis");
    const Rect& r = grid.rect();
    if (radius && !(*radius > 0)) throw InvalidArgument("probe radius must be positive");
    auto centers = [](double lo, double hi, double h, double rad, std::size_t n) {
      const double first = lo + (kMarginCells + 0.5) * h + rad, last = hi - (kMarginCells + 0.5) * h - rad;
      if (first > last)
        throw MarginViolation("probe radius " + std::to_string(rad) + " leaves no room for the 2-cell margin");
      // Each center is snapped to the nearest node: the sampled probe is then
      // symmetric about its center, so the discrete pairing of a derivative
      // against a constant cancels exactly. The half-cell slack above keeps
      // the margin after snapping.
      std::vector<double> c(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double x =
            n == 1 ? 0.5 * (lo + hi) : first + (last - first) * static_cast<double>(k) / static_cast<double>(n - 1);
        c[k] = snap_to_node(x, lo, h);
      }
      return c;
    };
    const double ru = radius.value_or(0.25 * (r.u_max - r.u_min));
    const double rv = radius.value_or(0.25 * (r.v_max - r.v_min));
    const auto cu = centers(r.u_min, r.u_max, grid.du(), ru, nu);
    const auto cv = centers(r.v_min, r.v_max, grid.dv(), rv, nv);
    std::vector<TestFunction2D> probes;
    for (std::size_t j = 0; j < nv; ++j)
      for (std::size_t i = 0; i < nu; ++i)
        probes.push_back(TestFunction2D::tensor(make_bump(cu[i], ru), make_bump(cv[j], rv)));
    return ProbeSet(std::move(probes), grid, seed, "lattice:" + std::to_string(nu) + "x" + std::to_string(nv));
  }

  /// count tensor bumps with random radii and random node centers, all respecting the margin.
  static ProbeSet random(const Grid2D& grid, std::size_t count, std::uint64_t seed) {
    const Rect& r = grid.rect();
    const double mu = (kMarginCells + 0.5) * grid.du(), mv = (kMarginCells + 0.5) * grid.dv();
    const double max_ru = 0.35 * (r.u_max - r.u_min), max_rv = 0.35 * (r.v_max - r.v_min);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<TestFunction2D> probes;
    for (std::size_t k = 0; k < count; ++k) {
      const double ru = max_ru * (0.6 + 0.4 * unit(rng));
      const double rv = max_rv * (0.6 + 0.4 * unit(rng));
      const double cu = r.u_min + mu + ru + unit(rng) * (r.u_max - r.u_min - 2 * (mu + ru));
      const double cv = r.v_min + mv + rv + unit(rng) * (r.v_max - r.v_min - 2 * (mv + rv));
      probes.push_back(TestFunction2D::tensor(make_bump(snap_to_node(cu, r.u_min, grid.du()), ru),
                                              make_bump(snap_to_node(cv, r.v_min, grid.dv()), rv)));
    }
    return ProbeSet(std::move(probes), grid, seed, "random:" + std::to_string(count));
  }

  /// "lattice:NxM", "lattice:NxM@radius" or "random:K".
  static ProbeSet parse(const std::string& spec, const Grid2D& grid, std::uint64_t seed) {
    auto fail = [&] { return InvalidArgument("bad probe spec '" + spec + "' (want lattice:NxM[@radius] or random:K)"); };
    try {
      if (spec.rfind("lattice:", 0) == 0) {
        std::string body = spec.substr(8);
        std::optional<double> radius;
        if (auto at = body.find('@'); at != std::string::npos) {
          std::size_t used = 0;
          radius = std::stod(body.substr(at + 1), &used);
          if (used != body.size() - at - 1) throw fail();
          body = body.substr(0, at);
        }
        const auto x = body.find('x');
        if (x == std::string::npos) throw fail();
        std::size_t used_a = 0, used_b = 0;
        const std::string a = body.substr(0, x), b = body.substr(x + 1);
        const long nu = std::stol(a, &used_a), nv = std::stol(b, &used_b);
        if (used_a != a.size() || used_b != b.size() || nu <= 0 || nv <= 0) throw fail();
        return lattice(grid, static_cast<std::size_t>(nu), static_cast<std::size_t>(nv), radius, seed);
      }
      if (spec.rfind("random:", 0) == 0) {
        std::size_t used = 0;
        const std::string body = spec.substr(7);
        const long k = std::stol(body, &used);
        if (used != body.size() || k <= 0) throw fail();
        return random(grid, static_cast<std::size_t>(k), seed);
      }
    } catch (const std::logic_error&) {  // stod/stol failures
      throw fail();
    }
    throw fail();
  }

  const std::vector<TestFunction2D>& probes() const noexcept { return probes_; }
  const std::vector<double>& l1_norms() const noexcept { return l1_; }
  std::size_t size() const noexcept { return probes_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<TestFunction2D> probes_;
  std::vector<double> l1_;
  std::uint64_t seed_;
  std::string label_;
};

/// max over probes of |F(phi)| / (scale * ||phi||_1). Scale defaults to the
/// functional's data magnitude; a zero scale is treated as 1.
inline double residual(const WeakFunctional& F, const ProbeSet& probes, std::optional<double> scale = {}) {
  double s = scale.value_or(F.scale());
  if (!(s > 0)) s = 1;
  double worst = 0;
  for (std::size_t k = 0; k < probes.size(); ++k)
    worst = std::max(worst, std::abs(F(probes.probes()[k])) / (s * probes.l1_norms()[k]));
  return worst;
}

/// Normalized discrepancy between the classical derivative g = df/du and the
/// weak derivative of f, probe by probe.
inline double classical_weak_agreement(const SampledField2D& f, const SampledField2D& g, const ProbeSet& probes) {
  return residual(weak_du(f) - as_functional(g), probes);
}

}  // namespace causal2d
