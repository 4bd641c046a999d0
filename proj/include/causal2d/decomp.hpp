#pragma once

// Constructive decompositions of fields whose weak derivatives vanish:
// reduction of u-independent fields to functions of v, the primitive split
// f = h + G of a field with known weak u-derivative, and additive separation
// f = alpha(u) + beta(v) of solutions of f_uv = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "causal2d/core.hpp"
#include "causal2d/errors.hpp"
#include "causal2d/pairing.hpp"
#include "causal2d/testfn.hpp"

namespace causal2d {

enum class Axis { u, v };

namespace detail {

inline void require_mollifier_fits(const Bump1D& phi0, Interval range, double h, const char* axis) {
  const Interval s = phi0.support();
  if (s.lo < range.lo + kMarginCells * h || s.hi > range.hi - kMarginCells * h)
    throw MarginViolation(std::string("mollifier support does not fit the ") + axis + " range with a 2-cell margin");
}

// Trapezoid weights times phi_0 at the nodes of one axis.
inline std::vector<double> mollifier_weights(const Bump1D& phi0, const std::vector<double>& nodes, double h) {
  auto w = trapezoid_weights(nodes.size(), h);
  for (std::size_t k = 0; k < nodes.size(); ++k) w[k] *= phi0(nodes[k]);
  return w;
}

}  // namespace detail

/// Mollified mean of f across `axis`: integrating out u gives a function of v,
/// integrating out v a function of u.
inline SampledFunction1D mollified_mean(const SampledField2D& f, const Bump1D& phi0, Axis integrate_out) {
  const Grid2D& g = f.grid();
  if (integrate_out == Axis::u) {
    detail::require_mollifier_fits(phi0, g.rect().u_range(), g.du(), "u");
    const auto w = detail::mollifier_weights(phi0, g.u_nodes(), g.du());
    std::vector<double> out(g.nv(), 0.0);
    for (std::size_t j = 0; j < g.nv(); ++j)
      for (std::size_t i = 0; i < g.nu(); ++i) out[j] += w[i] * f.at(i, j);
    return {g.v_nodes(), std::move(out)};
  }
  detail::require_mollifier_fits(phi0, g.rect().v_range(), g.dv(), "v");
  const auto w = detail::mollifier_weights(phi0, g.v_nodes(), g.dv());
  std::vector<double> out(g.nu(), 0.0);
  for (std::size_t j = 0; j < g.nv(); ++j)
    for (std::size_t i = 0; i < g.nu(); ++i) out[i] += w[j] * f.at(i, j);
  return {g.u_nodes(), std::move(out)};
}

/// Broadcast a function of one coordinate over a grid.
inline SampledField2D extend(const SampledFunction1D& fn, Axis depends_on, const Grid2D& grid) {
  const auto vals = fn.values();
  if (vals.size() != (depends_on == Axis::u ? grid.nu() : grid.nv()))
    throw InvalidArgument("1-D samples do not match the grid axis");
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.nv(); ++j)
    for (std::size_t i = 0; i < grid.nu(); ++i) out[j * grid.nu() + i] = depends_on == Axis::u ? vals[i] : vals[j];
  return SampledField2D(grid, std::move(out));
}

struct Reduction {
  SampledFunction1D h;  ///< h(v) = int f(s, v) phi_0(s) ds
  double deviation;     ///< max over the grid of |f(u, v) - h(v)|
};

/// For a u-independent f, recovers f as a function of v. The formula is total;
/// `deviation` flags inputs that were not u-independent.
inline Reduction reduce_to_1d(const SampledField2D& f, const Bump1D& phi0) {
  Reduction r{mollified_mean(f, phi0, Axis::u), 0.0};
  const Grid2D& g = f.grid();
  for (std::size_t j = 0; j < g.nv(); ++j)
    for (std::size_t i = 0; i < g.nu(); ++i) r.deviation = std::max(r.deviation, std::abs(f.at(i, j) - r.h.values()[j]));
  return r;
}

struct SplitReport {
  double precondition_residual;  ///< weak_du(f) - g on the probes
  double h_u_independent;        ///< (a) weak_du of h as a field
  double g_derivative;           ///< (b) dG/du - g
  double sum_identity;           ///< (c) <f, .> - <h, .> - G
};

struct PrimitiveSplit {
  SampledFunction1D h;
  WeakFunctional G;
  SplitReport report;
};

/// f = h + G with dh/du = 0 and dG/du = g, given weak_du(f) = g.
/// G is kept as a functional: phi -> -<g, eta_phi>.
inline PrimitiveSplit split_primitive(const SampledField2D& f, const SampledField2D& g, const Bump1D& phi0,
                                      const ProbeSet& probes, double tol = kDefaultWeakTol) {
  if (!(f.grid() == g.grid())) throw InvalidArgument("f and g must share a grid");
  const double pre = residual(weak_du(f) - as_functional(g), probes);
  if (!(pre <= tol))
    throw PreconditionFailed("weak u-derivative of f does not match g (residual " + std::to_string(pre) + ")");

  const Grid2D& grid = f.grid();
  const Rect window = grid.rect();
  SampledFunction1D h = mollified_mean(f, phi0, Axis::u);

  auto gp = std::make_shared<const SampledField2D>(g);
  WeakFunctional G(
      WeakFunctional::Kind::custom,
      [gp, phi0, window](const TestFunction2D& phi) { return -pair(*gp, build_psi_eta_1d(phi, phi0, window).eta); },
      std::max(f.max_abs(), g.max_abs()));

  const SampledField2D h_field = extend(h, Axis::v, grid);
  SplitReport rep{};
  rep.precondition_residual = pre;
  rep.h_u_independent = residual(weak_du(h_field), probes, f.max_abs());
  rep.g_derivative = residual(WeakFunctional(
                                  WeakFunctional::Kind::difference,
                                  [G, gp](const TestFunction2D& phi) { return -G(phi.derivative_u()) - pair(*gp, phi); },
                                  G.scale()),
                              probes);
  rep.sum_identity = residual(as_functional(f) - as_functional(h_field) - G, probes, f.max_abs());
  return {std::move(h), std::move(G), rep};
}

/// f(u, v) = alpha(u) + beta(v) + (residual), with
///   alpha(u) = int f(u, s) phi_0(s) ds,
///   beta(v)  = int f(s, v) phi_0(s) ds + c,
///   c        = <f, phi_1>,  phi_1 = -phi_0 (x) phi_0.
struct Separation {
  SampledFunction1D alpha;
  SampledFunction1D beta;
  double c;
  double residual;  ///< max over the grid of |f - alpha - beta|
};

inline Separation additively_separate(const SampledField2D& f, const Bump1D& phi0) {
  const Grid2D& g = f.grid();
  SampledFunction1D alpha = mollified_mean(f, phi0, Axis::v);
  SampledFunction1D mean_u = mollified_mean(f, phi0, Axis::u);

  const double c = pair(f, phi1(phi0));

  std::vector<double> beta(mean_u.values().begin(), mean_u.values().end());
  for (double& b : beta) b += c;

  double res = 0;
  for (std::size_t j = 0; j < g.nv(); ++j)
    for (std::size_t i = 0; i < g.nu(); ++i)
      res = std::max(res, std::abs(f.at(i, j) - alpha.values()[i] - beta[j]));
  return {std::move(alpha), SampledFunction1D(g.v_nodes(), std::move(beta)), c, res};
}

}  // namespace causal2d
