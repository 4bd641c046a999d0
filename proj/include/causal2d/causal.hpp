#pragma once

// Causal isomorphisms of the plane with its Minkowski order.
//
// A homeomorphism (u, v) -> (sigma, tau) is a causal isomorphism exactly when it
// leaves the wave equation theta_uv = 0 invariant and is of split form
// (phi(u), psi(v)) with both factors increasing, or (phi(v), psi(u)) with both
// decreasing. This header builds such maps, recognizes the split form from
// samples via weak derivatives, measures wave-equation invariance on a family of
// solutions, and checks the order directly with a Monte Carlo oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "causal2d/core.hpp"
#include "causal2d/decomp.hpp"
#include "causal2d/errors.hpp"
#include "causal2d/pairing.hpp"
#include "causal2d/testfn.hpp"

namespace causal2d {

enum class Direction { increasing, decreasing };

inline std::string to_string(Direction d) { return d == Direction::increasing ? "increasing" : "decreasing"; }

/// Adjacent samples of a strictly monotone map differ by at least this much.
inline constexpr double kStrictness = 1e-12;

/// Direction of strictly monotone samples, or nullopt if they are not.
inline std::optional<Direction> monotone_direction(std::span<const double> values) {
  if (values.size() < 2) return std::nullopt;
  const bool up = values[1] > values[0];
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double d = values[k] - values[k - 1];
    if (std::abs(d) < kStrictness || (d > 0) != up) return std::nullopt;
  }
  return up ? Direction::increasing : Direction::decreasing;
}

/// Strictly monotone continuous map on an interval, with its inverse.
class MonotoneMap1D {
 public:
  /// Validates strict monotonicity on `checks` uniform samples of the domain.
  static MonotoneMap1D from_function(std::function<double(double)> fn, Interval domain, std::size_t checks = 1025) {
    if (!(domain.lo < domain.hi)) throw InvalidArgument("monotone map needs a non-empty domain");
    std::vector<double> vals(checks);
    for (std::size_t k = 0; k < checks; ++k)
      vals[k] = fn(domain.lo + domain.span() * static_cast<double>(k) / static_cast<double>(checks - 1));
    const auto dir = monotone_direction(vals);
    if (!dir) throw NotHomeomorphism("map is not strictly monotone on its domain");
    return MonotoneMap1D(std::move(fn), {}, domain, *dir);
  }

  /// Piecewise-linear map through (x, y) points with increasing x.
  static MonotoneMap1D from_table(SampledFunction1D table) {
    const auto dir = monotone_direction(table.values());
    if (!dir) throw NotHomeomorphism("table is not strictly monotone");
    const Interval dom = table.domain();
    return MonotoneMap1D({}, std::move(table), dom, *dir);
  }

  double operator()(double x) const { return table_ ? (*table_)(x) : fn_(x); }

  /// Bisection for analytic maps, inverse interpolation for tables.
  double inverse(double y) const {
    const Interval img = image();
    if (y < img.lo || y > img.hi) throw InvalidArgument("value outside the image of the monotone map");
    if (table_) {
      const auto xs = table_->coords(), ys = table_->values();
      std::size_t lo = 0, hi = xs.size() - 1;
      const bool up = dir_ == Direction::increasing;
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if ((ys[mid] <= y) == up) lo = mid;
        else hi = mid;
      }
      const double a = (y - ys[lo]) / (ys[hi] - ys[lo]);
      return xs[lo] + a * (xs[hi] - xs[lo]);
    }
    double lo = domain_.lo, hi = domain_.hi;
    const bool up = dir_ == Direction::increasing;
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo));
         ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((fn_(mid) <= y) == up) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  Interval domain() const noexcept { return domain_; }
  Direction direction() const noexcept { return dir_; }
  Interval image() const {
    const double a = (*this)(domain_.lo), b = (*this)(domain_.hi);
    return {std::min(a, b), std::max(a, b)};
  }

 private:
  MonotoneMap1D(std::function<double(double)> fn, std::optional<SampledFunction1D> table, Interval domain,
                Direction dir)
      : fn_(std::move(fn)), table_(std::move(table)), domain_(domain), dir_(dir) {}

  std::function<double(double)> fn_;
  std::optional<SampledFunction1D> table_;
  Interval domain_;
  Direction dir_;
};

struct Point {
  double u;
  double v;
};

/// Homeomorphism between rectangles, (u, v) -> (sigma, tau), with its inverse.
class PlaneMap {
 public:
  enum class Kind { split_increasing, split_decreasing_swapped, general };
  using Fn = std::function<Point(double, double)>;

  PlaneMap(Fn forward, Fn inverse, Rect domain, Rect codomain, Kind kind = Kind::general)
      : forward_(std::move(forward)), inverse_(std::move(inverse)), domain_(domain), codomain_(codomain), kind_(kind) {
    domain_.validate();
    codomain_.validate();
  }

  /// (phi(u), psi(v)), or (phi(v), psi(u)) when swapped, with no orientation
  /// requirement: useful for building maps that are deliberately not causal.
  static PlaneMap split_layout(const MonotoneMap1D& phi, const MonotoneMap1D& psi, bool swapped) {
    const Interval pi = phi.image(), si = psi.image();
    const Rect codomain{pi.lo, pi.hi, si.lo, si.hi};
    if (!swapped) {
      const Rect domain{phi.domain().lo, phi.domain().hi, psi.domain().lo, psi.domain().hi};
      return PlaneMap([phi, psi](double u, double v) { return Point{phi(u), psi(v)}; },
                      [phi, psi](double s, double t) { return Point{phi.inverse(s), psi.inverse(t)}; }, domain,
                      codomain, Kind::general);
    }
    const Rect domain{psi.domain().lo, psi.domain().hi, phi.domain().lo, phi.domain().hi};
    return PlaneMap([phi, psi](double u, double v) { return Point{phi(v), psi(u)}; },
                    [phi, psi](double s, double t) { return Point{psi.inverse(t), phi.inverse(s)}; }, domain,
                    codomain, Kind::general);
  }

  Point operator()(double u, double v) const { return forward_(u, v); }
  Point inverse(double s, double t) const { return inverse_(s, t); }
  const Rect& domain() const noexcept { return domain_; }
  const Rect& codomain() const noexcept { return codomain_; }
  Kind kind() const noexcept { return kind_; }

  PlaneMap with_kind(Kind k) const {
    PlaneMap out = *this;
    out.kind_ = k;
    return out;
  }

 private:
  Fn forward_;
  Fn inverse_;
  Rect domain_;
  Rect codomain_;
  Kind kind_;
};

/// Bounding box of F(domain), from an n x n sample including the boundary.
inline Rect image_bounds(const PlaneMap::Fn& forward, const Rect& domain, std::size_t n = 257) {
  Rect r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double u = domain.u_min + (domain.u_max - domain.u_min) * static_cast<double>(i) / static_cast<double>(n - 1);
      const double v = domain.v_min + (domain.v_max - domain.v_min) * static_cast<double>(j) / static_cast<double>(n - 1);
      const Point p = forward(u, v);
      r.u_min = std::min(r.u_min, p.u);
      r.u_max = std::max(r.u_max, p.u);
      r.v_min = std::min(r.v_min, p.v);
      r.v_max = std::max(r.v_max, p.v);
    }
  r.validate();
  return r;
}

/// Inverse of `forward` on `domain` by damped Newton iteration with a
/// finite-difference Jacobian, started from the nearest point of a coarse
/// sample. Targets outside the image converge to a boundary point; callers
/// that care check the round trip.
inline PlaneMap::Fn newton_inverse(PlaneMap::Fn forward, Rect domain, std::size_t seed_points = 33) {
  struct Table {
    std::vector<Point> at;
    std::vector<Point> img;
  };
  auto table = std::make_shared<Table>();
  for (std::size_t j = 0; j < seed_points; ++j)
    for (std::size_t i = 0; i < seed_points; ++i) {
      const double a = static_cast<double>(i) / static_cast<double>(seed_points - 1);
      const double b = static_cast<double>(j) / static_cast<double>(seed_points - 1);
      const Point p{domain.u_min + a * (domain.u_max - domain.u_min), domain.v_min + b * (domain.v_max - domain.v_min)};
      table->at.push_back(p);
      table->img.push_back(forward(p.u, p.v));
    }
  return [forward = std::move(forward), domain, table](double s, double t) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < table->img.size(); ++k) {
      const double d = std::hypot(table->img[k].u - s, table->img[k].v - t);
      if (d < best_d) best_d = d, best = k;
    }
    Point x = table->at[best];
    const double hu = 1e-7 * (domain.u_max - domain.u_min), hv = 1e-7 * (domain.v_max - domain.v_min);
    auto clamp = [&](Point p) {
      return Point{std::clamp(p.u, domain.u_min, domain.u_max), std::clamp(p.v, domain.v_min, domain.v_max)};
    };
    for (int it = 0; it < 60; ++it) {
      const Point f = forward(x.u, x.v);
      const double ru = f.u - s, rv = f.v - t;
      const double r0 = std::hypot(ru, rv);
      if (r0 <= 1e-14 * (1 + std::hypot(s, t))) break;
      const double su = x.u + hu <= domain.u_max ? hu : -hu;
      const double sv = x.v + hv <= domain.v_max ? hv : -hv;
      const Point fu = forward(x.u + su, x.v), fv = forward(x.u, x.v + sv);
      const double a = (fu.u - f.u) / su, b = (fv.u - f.u) / sv, c = (fu.v - f.v) / su, d = (fv.v - f.v) / sv;
      const double det = a * d - b * c;
      if (det == 0 || !std::isfinite(det)) break;
      const Point step{(d * ru - b * rv) / det, (-c * ru + a * rv) / det};
      double lambda = 1;
      bool moved = false;
      for (int k = 0; k < 30; ++k, lambda *= 0.5) {
        const Point y = clamp({x.u - lambda * step.u, x.v - lambda * step.v});
        const Point fy = forward(y.u, y.v);
        if (std::hypot(fy.u - s, fy.v - t) < r0) {
          x = y;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    return x;
  };
}

inline std::string to_string(PlaneMap::Kind k) {
  switch (k) {
    case PlaneMap::Kind::split_increasing: return "split-increasing";
    case PlaneMap::Kind::split_decreasing_swapped: return "split-decreasing-swapped";
    case PlaneMap::Kind::general: return "general";
  }
  return "unknown";
}

/// F(u, v) = (phi(u), psi(v)) for increasing phi, psi; (phi(v), psi(u)) for decreasing ones.
inline PlaneMap make_causal_iso(const MonotoneMap1D& phi, const MonotoneMap1D& psi) {
  if (phi.direction() != psi.direction())
    throw InvalidOrientationPair("phi is " + to_string(phi.direction()) + " but psi is " +
                                 to_string(psi.direction()) + "; both must share a direction");
  const bool swapped = phi.direction() == Direction::decreasing;
  return PlaneMap::split_layout(phi, psi, swapped)
      .with_kind(swapped ? PlaneMap::Kind::split_decreasing_swapped : PlaneMap::Kind::split_increasing);
}

struct HomeomorphismCheck {
  double roundtrip_error;     ///< max |F^-1(F(p)) - p| over the sample, relative to the domain span
  double codomain_overflow;   ///< how far F(p) leaves the codomain, relative to its span
  bool ok;
};

/// inverse(forward(p)) = p within 1e-6 of the domain span on an n x n sample.
inline HomeomorphismCheck check_homeomorphism(const PlaneMap& F, std::size_t n = 20, double tol = 1e-6) {
  const Rect& d = F.domain();
  const Rect& c = F.codomain();
  const double span = std::max(d.u_max - d.u_min, d.v_max - d.v_min);
  const double cspan = std::max(c.u_max - c.u_min, c.v_max - c.v_min);
  HomeomorphismCheck out{0, 0, true};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double u = d.u_min + (d.u_max - d.u_min) * static_cast<double>(i) / static_cast<double>(n - 1);
      const double v = d.v_min + (d.v_max - d.v_min) * static_cast<double>(j) / static_cast<double>(n - 1);
      const Point img = F(u, v);
      const double over = std::max({c.u_min - img.u, img.u - c.u_max, c.v_min - img.v, img.v - c.v_max, 0.0});
      out.codomain_overflow = std::max(out.codomain_overflow, over / cspan);
      const Point back = F.inverse(img.u, img.v);
      out.roundtrip_error = std::max(out.roundtrip_error, std::max(std::abs(back.u - u), std::abs(back.v - v)) / span);
    }
  out.ok = out.roundtrip_error <= tol && out.codomain_overflow <= tol;
  return out;
}

/// sigma and tau sampled on a grid of the domain.
struct MapSamples {
  SampledField2D sigma;
  SampledField2D tau;
};

inline MapSamples sample_map(const PlaneMap& F, const Grid2D& grid) {
  std::vector<double> s(grid.size()), t(grid.size());
  for (std::size_t j = 0; j < grid.nv(); ++j)
    for (std::size_t i = 0; i < grid.nu(); ++i) {
      const Point p = F(grid.u(i), grid.v(j));
      s[j * grid.nu() + i] = p.u;
      t[j * grid.nu() + i] = p.v;
    }
  return {SampledField2D(grid, std::move(s)), SampledField2D(grid, std::move(t))};
}

enum class Classification { split_increasing, split_decreasing_swapped, not_split, non_monotone };

inline std::string to_string(Classification c) {
  switch (c) {
    case Classification::split_increasing: return "split-increasing";
    case Classification::split_decreasing_swapped: return "split-decreasing-swapped";
    case Classification::not_split: return "not-split";
    case Classification::non_monotone: return "non-monotone";
  }
  return "unknown";
}

/// Which layout the samples fit: sigma = sigma(u), tau = tau(v) (direct) or
/// sigma = sigma(v), tau = tau(u) (swapped).
enum class SplitLayout { direct, swapped, none };

enum class Condition { increasing_uv, decreasing_vu };

/// Condition (1): sigma, tau increasing in u, v. Condition (2): decreasing in v, u.
inline std::string to_string(Condition c) { return c == Condition::increasing_uv ? "(1)" : "(2)"; }

struct SplitAnalysis {
  double sigma_du = 0, sigma_dv = 0, tau_du = 0, tau_dv = 0;  ///< weak-derivative residuals
  SplitLayout layout = SplitLayout::none;
  Classification classification = Classification::not_split;
  /// Extracted one-dimensional factors (mollified means); empty unless a layout was found.
  SampledFunction1D phi;
  SampledFunction1D psi;
  std::optional<Direction> phi_direction;
  std::optional<Direction> psi_direction;
};

/// Mollifier centred in a range, a quarter of its span wide.
inline Bump1D default_mollifier(Interval range) { return mollifier(range.mid(), 0.25 * range.span()); }

/// Reads the split form off sampled sigma, tau: a vanishing weak derivative in
/// one variable means dependence on the other only. The factors are then
/// recovered as mollified means and tested for strict monotonicity.
inline SplitAnalysis classify_split_form(const MapSamples& samples, const ProbeSet& probes,
                                         double tol = kDefaultWeakTol,
                                         std::optional<Bump1D> phi0 = std::nullopt) {
  const Grid2D& g = samples.sigma.grid();
  SplitAnalysis a;
  a.sigma_du = residual(weak_du(samples.sigma), probes);
  a.sigma_dv = residual(weak_dv(samples.sigma), probes);
  a.tau_du = residual(weak_du(samples.tau), probes);
  a.tau_dv = residual(weak_dv(samples.tau), probes);

  const bool sigma_const = a.sigma_du < tol && a.sigma_dv < tol;
  const bool tau_const = a.tau_du < tol && a.tau_dv < tol;
  if (sigma_const || tau_const)
    throw NotBijective(std::string(sigma_const ? "sigma" : "tau") + " is constant in both variables");

  if (a.sigma_dv < tol && a.tau_du < tol) a.layout = SplitLayout::direct;
  else if (a.sigma_du < tol && a.tau_dv < tol) a.layout = SplitLayout::swapped;
  else return a;

  const Bump1D mol_u = phi0.value_or(default_mollifier(g.rect().u_range()));
  const Bump1D mol_v = phi0.value_or(default_mollifier(g.rect().v_range()));
  if (a.layout == SplitLayout::direct) {
    a.phi = mollified_mean(samples.sigma, mol_v, Axis::v);  // function of u
    a.psi = mollified_mean(samples.tau, mol_u, Axis::u);    // function of v
  } else {
    a.phi = mollified_mean(samples.sigma, mol_u, Axis::u);  // function of v
    a.psi = mollified_mean(samples.tau, mol_v, Axis::v);    // function of u
  }
  a.phi_direction = monotone_direction(a.phi.values());
  a.psi_direction = monotone_direction(a.psi.values());

  const Direction want = a.layout == SplitLayout::direct ? Direction::increasing : Direction::decreasing;
  if (a.phi_direction == want && a.psi_direction == want)
    a.classification = a.layout == SplitLayout::direct ? Classification::split_increasing
                                                      : Classification::split_decreasing_swapped;
  else
    a.classification = Classification::non_monotone;
  return a;
}

inline SplitAnalysis classify_split_form(const PlaneMap& F, const Grid2D& grid, const ProbeSet& probes,
                                         double tol = kDefaultWeakTol,
                                         std::optional<Bump1D> phi0 = std::nullopt) {
  return classify_split_form(sample_map(F, grid), probes, tol, phi0);
}

/// Condition (1) or (2) for a split-form map; NonMonotone otherwise.
inline Condition monotonicity_check(const SplitAnalysis& a) {
  if (a.layout == SplitLayout::none) throw NonMonotone("map is not of split form");
  if (a.classification == Classification::split_increasing) return Condition::increasing_uv;
  if (a.classification == Classification::split_decreasing_swapped) return Condition::decreasing_vu;
  auto describe = [](const std::optional<Direction>& d) { return d ? to_string(*d) : std::string("not monotone"); };
  throw NonMonotone(std::string(a.layout == SplitLayout::direct ? "sigma(u), tau(v)" : "sigma(v), tau(u)") +
                    " with phi " + describe(a.phi_direction) + " and psi " + describe(a.psi_direction));
}

/// theta(a, b) = A(a) + B(b): a solution of the wave equation in null coordinates.
struct WaveSolution {
  std::string name;
  std::function<double(double)> A;
  std::function<double(double)> B;
  bool normalized;  ///< A, B act on coordinates rescaled to [-1, 1] over the rect
};

/// The four canonical solutions a, b, a^2, b^2 plus mixed pairs from
/// {x, x^2, x^3, sin 2x, exp x}.
inline std::vector<WaveSolution> default_wave_family() {
  const auto zero = [](double) { return 0.0; };
  const auto id = [](double x) { return x; };
  const auto sq = [](double x) { return x * x; };
  std::vector<WaveSolution> fam = {
      {"a", id, zero, false}, {"b", zero, id, false}, {"a^2", sq, zero, false}, {"b^2", zero, sq, false}};
  const std::vector<std::pair<std::string, std::function<double(double)>>> basis = {
      {"x", id},
      {"x^2", sq},
      {"x^3", [](double x) { return x * x * x; }},
      {"sin(2x)", [](double x) { return std::sin(2 * x); }},
      {"exp(x)", [](double x) { return std::exp(x); }}};
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& [na, fa] = basis[k];
    const auto& [nb, fb] = basis[(k + 2) % basis.size()];
    fam.push_back({na + "|" + nb, fa, fb, true});
  }
  return fam;
}

struct WaveInvarianceRecord {
  std::string name;
  double forward;
  double backward;
};

struct WaveInvariance {
  double forward = 0;   ///< max weak_mixed residual of theta(F(u, v)) over the family
  double backward = 0;  ///< same for solutions in (u, v) pushed through F^-1
  std::size_t backward_probe_count = 0;
  std::vector<WaveInvarianceRecord> records;
  std::optional<std::string> backward_error;
};

namespace detail {

inline double normalize(double x, Interval r) { return (x - r.mid()) / (0.5 * r.span()); }

// theta_k evaluated on sampled coordinates (a, b) living in rect `coords`.
inline SampledField2D compose_solution(const WaveSolution& sol, const SampledField2D& a, const SampledField2D& b,
                                       const Rect& coords) {
  std::vector<double> out(a.values().size());
  const auto av = a.values(), bv = b.values();
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double x = sol.normalized ? normalize(av[k], coords.u_range()) : av[k];
    const double y = sol.normalized ? normalize(bv[k], coords.v_range()) : bv[k];
    out[k] = sol.A(x) + sol.B(y);
  }
  return SampledField2D(a.grid(), std::move(out));
}

}  // namespace detail

/// Codomain probes whose supports lie inside F(domain), tested on the support
/// boundary through F^-1.
inline std::vector<TestFunction2D> probes_inside_image(const PlaneMap& F, const ProbeSet& candidates) {
  const Rect& d = F.domain();
  const double su = 1e-9 * (d.u_max - d.u_min), sv = 1e-9 * (d.v_max - d.v_min);
  std::vector<TestFunction2D> kept;
  for (const auto& p : candidates.probes()) {
    const Rect s = p.support();
    bool inside = true;
    constexpr int n = 8;
    for (int k = 0; k <= n && inside; ++k) {
      const double a = static_cast<double>(k) / n;
      const Point edge[4] = {{s.u_min + a * (s.u_max - s.u_min), s.v_min},
                             {s.u_min + a * (s.u_max - s.u_min), s.v_max},
                             {s.u_min, s.v_min + a * (s.v_max - s.v_min)},
                             {s.u_max, s.v_min + a * (s.v_max - s.v_min)}};
      for (const Point& e : edge) {
        const Point back = F.inverse(e.u, e.v);
        if (!(back.u >= d.u_min - su && back.u <= d.u_max + su && back.v >= d.v_min - sv && back.v <= d.v_max + sv)) {
          inside = false;
          break;
        }
      }
    }
    if (inside) kept.push_back(p);
  }
  return kept;
}

/// Invariance of theta_uv = 0 under F, both ways, on a finite solution family.
/// `forward_samples` are F sampled on the domain grid; probes for the backward
/// direction are built from `probe_spec` on the codomain grid and, for general
/// maps, clipped to the image of the domain. If the backward direction cannot
/// be evaluated, its residual is NaN and `backward_error` says why.
inline WaveInvariance wave_invariance_test(const PlaneMap& F, const MapSamples& forward_samples,
                                           const ProbeSet& domain_probes, const Grid2D& codomain_grid,
                                           const std::string& probe_spec, std::uint64_t seed,
                                           const std::vector<WaveSolution>& family = default_wave_family()) {
  WaveInvariance out;
  for (const auto& sol : family) {
    const double fwd = residual(
        weak_mixed(detail::compose_solution(sol, forward_samples.sigma, forward_samples.tau, F.codomain())),
        domain_probes);
    out.forward = std::max(out.forward, fwd);
    out.records.push_back({sol.name, fwd, std::numeric_limits<double>::quiet_NaN()});
  }

  try {
    const MapSamples back_samples = sample_map(
        PlaneMap([&F](double s, double t) { return F.inverse(s, t); }, [&F](double u, double v) { return F(u, v); },
                 F.codomain(), F.domain()),
        codomain_grid);
    const ProbeSet all_back = ProbeSet::parse(probe_spec, codomain_grid, seed);
    std::optional<ProbeSet> back_probes;
    if (F.kind() == PlaneMap::Kind::general) {
      auto kept = probes_inside_image(F, all_back);
      if (kept.empty()) throw InvalidArgument("no codomain probe fits inside the image of the domain");
      back_probes.emplace(std::move(kept), codomain_grid, seed, all_back.label() + " (clipped to image)");
    } else {
      back_probes.emplace(all_back);
    }
    out.backward_probe_count = back_probes->size();
    for (std::size_t k = 0; k < family.size(); ++k) {
      const double bwd = residual(
          weak_mixed(detail::compose_solution(family[k], back_samples.sigma, back_samples.tau, F.domain())),
          *back_probes);
      out.backward = std::max(out.backward, bwd);
      out.records[k].backward = bwd;
    }
  } catch (const Error& e) {
    out.backward = std::numeric_limits<double>::quiet_NaN();
    out.backward_error = e.what();
  }
  return out;
}

/// Counts sampled pairs whose causal relation F fails to preserve, in either order.
inline std::size_t order_oracle(const PlaneMap& F, std::size_t n_pairs, std::uint64_t seed) {
  const Rect& d = F.domain();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> du(d.u_min, d.u_max), dv(d.v_min, d.v_max);
  std::size_t violations = 0;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const Event p = Event::null(du(rng), dv(rng));
    const Event q = Event::null(du(rng), dv(rng));
    const Point fp = F(p.u(), p.v()), fq = F(q.u(), q.v());
    const Event Fp = Event::null(fp.u, fp.v), Fq = Event::null(fq.u, fq.v);
    if (causal_leq(p, q) != causal_leq(Fp, Fq) || causal_leq(q, p) != causal_leq(Fq, Fp)) ++violations;
  }
  return violations;
}

struct DecisionConfig {
  std::size_t grid = 256;
  std::string probes = "lattice:5x5";
  double tol = kDefaultWeakTol;
  std::size_t oracle_pairs = 10'000;
  std::uint64_t seed = 42;
  std::optional<Bump1D> mollifier;  ///< default: centred in each axis range
};

struct CausalVerdict {
  bool is_causal_iso = false;
  Classification classification = Classification::not_split;
  std::optional<Condition> condition;
  double invariance_residual_forward = std::numeric_limits<double>::quiet_NaN();
  double invariance_residual_backward = std::numeric_limits<double>::quiet_NaN();
  std::size_t oracle_violations = 0;

  struct Details {
    HomeomorphismCheck homeomorphism{};
    std::optional<SplitAnalysis> split;
    std::vector<WaveInvarianceRecord> invariance;
    std::size_t backward_probe_count = 0;
    bool structural_verdict = false;  ///< split form with matching directions
    std::vector<std::string> errors;  ///< sub-test failures, by name
  } details;
};

/// Runs the structural classifier, the monotonicity condition, the
/// wave-invariance test and the order oracle, and combines them: the map is a
/// causal isomorphism only if it is of split form with condition (1) or (2),
/// both invariance residuals are below tol and the oracle finds no violation.
inline CausalVerdict decide_causal_isomorphism(const PlaneMap& F, const DecisionConfig& cfg = {}) {
  CausalVerdict v;
  auto note = [&](const std::string& stage, const std::exception& e) {
    v.details.errors.push_back(stage + ": " + e.what());
  };

  try {
    v.details.homeomorphism = check_homeomorphism(F);
    if (!v.details.homeomorphism.ok) v.details.errors.push_back("homeomorphism: forward/inverse round trip failed");
  } catch (const std::exception& e) {
    note("homeomorphism", e);
  }

  const Grid2D domain_grid = Grid2D::square(F.domain(), cfg.grid);
  const Grid2D codomain_grid = Grid2D::square(F.codomain(), cfg.grid);
  std::optional<MapSamples> samples;
  std::optional<ProbeSet> probes;
  try {
    samples = sample_map(F, domain_grid);
    probes = ProbeSet::parse(cfg.probes, domain_grid, cfg.seed);
  } catch (const std::exception& e) {
    note("sampling", e);
  }

  if (samples && probes) {
    try {
      v.details.split = classify_split_form(*samples, *probes, cfg.tol, cfg.mollifier);
      v.classification = v.details.split->classification;
      try {
        v.condition = monotonicity_check(*v.details.split);
      } catch (const NonMonotone& e) {
        note("monotonicity", e);
      }
    } catch (const std::exception& e) {
      v.classification = Classification::not_split;
      note("classification", e);
    }
    try {
      const WaveInvariance w = wave_invariance_test(F, *samples, *probes, codomain_grid, cfg.probes, cfg.seed);
      v.invariance_residual_forward = w.forward;
      v.invariance_residual_backward = w.backward;
      v.details.invariance = w.records;
      v.details.backward_probe_count = w.backward_probe_count;
      if (w.backward_error) v.details.errors.push_back("wave-invariance (backward): " + *w.backward_error);
    } catch (const std::exception& e) {
      note("wave-invariance", e);
    }
  }

  try {
    v.oracle_violations = order_oracle(F, cfg.oracle_pairs, cfg.seed);
  } catch (const std::exception& e) {
    note("oracle", e);
  }

  const bool split = v.classification == Classification::split_increasing ||
                     v.classification == Classification::split_decreasing_swapped;
  v.details.structural_verdict = split && v.condition.has_value();
  v.is_causal_iso = v.details.structural_verdict && v.invariance_residual_forward < cfg.tol &&
                    v.invariance_residual_backward < cfg.tol && v.oracle_violations == 0 &&
                    v.details.homeomorphism.ok;
  return v;
}

}  // namespace causal2d
