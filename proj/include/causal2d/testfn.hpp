#pragma once

// Compactly supported smooth test functions.
//
// Every test function here is a finite sum of separable terms a(u) * b(v) whose
// one-dimensional factors are linear combinations of "atoms": the standard bump
// exp(-1/(1-s^2)) (shifted, scaled), its first two derivatives, or its
// antiderivative. That family is closed under the operations needed below
// (differentiation, integration along an axis, the psi/eta constructions), so
// everything stays analytic except the bump antiderivative, which is tabulated
// once.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causal2d/core.hpp"
#include "causal2d/errors.hpp"

namespace causal2d {

namespace detail {

inline constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975362316835609, -0.7966664774136267395915539, -0.5255324099163289858177390,
    -0.1834346424956498049394761, 0.1834346424956498049394761,  0.5255324099163289858177390,
    0.7966664774136267395915539,  0.9602898564975362316835609};
inline constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903762591525314, 0.2223810344533744705443560, 0.3137066458778872873379622,
    0.3626837833783619829651504, 0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

template <class F>
double gauss8(F&& f, double a, double b) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0;
  for (std::size_t k = 0; k < 8; ++k) acc += kGaussWeights[k] * f(mid + half * kGaussNodes[k]);
  return half * acc;
}

}  // namespace detail

// Standard bump g(s) = exp(-1/(1-s^2)) on (-1, 1) and its closed-form derivatives.
inline double std_bump(double s) noexcept {
  const double w = 1 - s * s;
  return w > 0 ? std::exp(-1 / w) : 0.0;
}

inline double std_bump_d1(double s) noexcept {
  const double g = std_bump(s);
  if (g == 0) return 0;
  const double q = 1 / (1 - s * s);
  return -2 * s * q * q * g;
}

inline double std_bump_d2(double s) noexcept {
  const double g = std_bump(s);
  if (g == 0) return 0;
  const double q = 1 / (1 - s * s), q2 = q * q;
  return g * (4 * s * s * q2 * q2 - 2 * q2 - 8 * s * s * q2 * q);
}

/// Integral of the standard bump over [-1, 1].
///
/// No closed form; computed once by a 10^6-interval composite trapezoid rule,
/// which is spectrally accurate for this flat-ended integrand.
inline double std_bump_integral() {
  static const double value = [] {
    constexpr std::size_t n = 1'000'000;
    const double h = 2.0 / static_cast<double>(n);
    double acc = 0;  // endpoint values vanish
    for (std::size_t k = 1; k < n; ++k) acc += std_bump(-1 + static_cast<double>(k) * h);
    return acc * h;
  }();
  return value;
}

/// G(s) = integral of the standard bump over [-1, s]; G = 0 left of -1, G = std_bump_integral() right of 1.
inline double std_bump_cdf(double s) {
  constexpr std::size_t cells = 4096;
  constexpr double h = 2.0 / cells;
  static const std::vector<double> table = [] {
    std::vector<double> t(cells + 1, 0.0);
    for (std::size_t k = 0; k < cells; ++k) {
      const double a = -1 + static_cast<double>(k) * h;
      t[k + 1] = t[k] + detail::gauss8(std_bump, a, a + h);
    }
    return t;
  }();
  if (s <= -1) return 0;
  if (s >= 1) return std_bump_integral();
  auto k = static_cast<std::size_t>((s + 1) / h);
  if (k >= cells) k = cells - 1;
  const double a = -1 + static_cast<double>(k) * h;
  return table[k] + detail::gauss8(std_bump, a, s);
}

/// amplitude * exp(-1/(1-s^2)), s = (x - center)/radius, zero for |s| >= 1.
struct Bump1D {
  double center = 0;
  double radius = 1;
  double amplitude = 1;

  double scaled(double x) const noexcept { return (x - center) / radius; }
  double operator()(double x) const noexcept { return amplitude * std_bump(scaled(x)); }
  double d1(double x) const noexcept { return amplitude * std_bump_d1(scaled(x)) / radius; }
  double d2(double x) const noexcept { return amplitude * std_bump_d2(scaled(x)) / (radius * radius); }
  /// Integral over the real line.
  double integral() const { return amplitude * radius * std_bump_integral(); }
  /// Integral over (-inf, x].
  double primitive(double x) const { return amplitude * radius * std_bump_cdf(scaled(x)); }
  Interval support() const noexcept { return {center - radius, center + radius}; }
};

inline Bump1D make_bump(double center, double radius, double amplitude = 1) {
  if (!(radius > 0) || !std::isfinite(radius)) throw InvalidArgument("bump radius must be positive");
  if (!std::isfinite(center) || !std::isfinite(amplitude)) throw InvalidArgument("bump parameters must be finite");
  return {center, radius, amplitude};
}

/// Unit-mass bump: the mollifier phi_0.
inline Bump1D mollifier(double center, double radius) {
  if (!(radius > 0)) throw InvalidArgument("mollifier radius must be positive");
  return make_bump(center, radius, 1 / (radius * std_bump_integral()));
}

/// A bump differentiated `order` times; order -1 is its antiderivative from -inf.
struct Atom {
  Bump1D bump;
  int order = 0;

  double operator()(double x) const {
    switch (order) {
      case -1: return bump.primitive(x);
      case 0: return bump(x);
      case 1: return bump.d1(x);
      case 2: return bump.d2(x);
      default: throw InvalidArgument("bump derivatives above order 2 are not available");
    }
  }
};

/// Linear combination of atoms, with a declared support interval outside of
/// which the combination vanishes (up to round-off).
class Factor1D {
 public:
  Factor1D() = default;
  Factor1D(std::vector<Atom> atoms, Interval support) : atoms_(std::move(atoms)), support_(support) {}

  static Factor1D bump(const Bump1D& b) { return Factor1D({Atom{b, 0}}, b.support()); }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  Interval support() const noexcept { return support_; }

  double operator()(double x) const {
    double acc = 0;
    for (const Atom& a : atoms_) acc += a(x);
    return acc;
  }

  Factor1D derivative() const {
    Factor1D out = *this;
    for (Atom& a : out.atoms_) {
      if (a.order >= 2) throw InvalidArgument("bump derivatives above order 2 are not available");
      ++a.order;
    }
    return out;
  }

  /// x -> integral of this factor over (-inf, x]. Support extends to +inf.
  Factor1D antiderivative() const {
    Factor1D out = *this;
    for (Atom& a : out.atoms_) {
      if (a.order <= -1) throw InvalidArgument("second antiderivatives of bumps are not available");
      --a.order;
    }
    out.support_.hi = std::numeric_limits<double>::infinity();
    return out;
  }

  /// Integral over the real line (requires compact support).
  double integral() const {
    double acc = 0;
    for (const Atom& a : atoms_) {
      if (a.order == -1) throw InvalidArgument("integral of a non-compact factor");
      if (a.order == 0) acc += a.bump.integral();
      // derivatives of compactly supported functions integrate to zero
    }
    return acc;
  }

  Factor1D scaled(double c) const {
    Factor1D out = *this;
    for (Atom& a : out.atoms_) a.bump.amplitude *= c;
    return out;
  }

  Factor1D& operator+=(const Factor1D& o) {
    if (atoms_.empty()) {
      support_ = o.support_;
    } else if (!o.atoms_.empty()) {
      support_ = {std::min(support_.lo, o.support_.lo), std::max(support_.hi, o.support_.hi)};
    }
    atoms_.insert(atoms_.end(), o.atoms_.begin(), o.atoms_.end());
    return *this;
  }

  Factor1D with_support(Interval s) const {
    Factor1D out = *this;
    out.support_ = s;
    return out;
  }

 private:
  std::vector<Atom> atoms_;
  Interval support_{0, 0};
};

/// Smooth compactly supported function of (u, v): a sum of products u_factor(u) * v_factor(v).
class TestFunction2D {
 public:
  struct Term {
    Factor1D u;
    Factor1D v;
  };

  TestFunction2D() = default;
  explicit TestFunction2D(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static TestFunction2D tensor(const Factor1D& a, const Factor1D& b) { return TestFunction2D({Term{a, b}}); }
  static TestFunction2D tensor(const Bump1D& a, const Bump1D& b) {
    return tensor(Factor1D::bump(a), Factor1D::bump(b));
  }

  const std::vector<Term>& terms() const noexcept { return terms_; }

  double operator()(double u, double v) const {
    double acc = 0;
    for (const Term& t : terms_) acc += t.u(u) * t.v(v);
    return acc;
  }
  double du(double u, double v) const {
    double acc = 0;
    for (const Term& t : terms_) acc += t.u.derivative()(u) * t.v(v);
    return acc;
  }
  double dv(double u, double v) const {
    double acc = 0;
    for (const Term& t : terms_) acc += t.u(u) * t.v.derivative()(v);
    return acc;
  }
  double duv(double u, double v) const {
    double acc = 0;
    for (const Term& t : terms_) acc += t.u.derivative()(u) * t.v.derivative()(v);
    return acc;
  }

  TestFunction2D derivative_u() const {
    TestFunction2D out = *this;
    for (Term& t : out.terms_) t.u = t.u.derivative();
    return out;
  }
  TestFunction2D derivative_v() const {
    TestFunction2D out = *this;
    for (Term& t : out.terms_) t.v = t.v.derivative();
    return out;
  }

  /// Bounding rectangle of the support. Declared explicitly for constructions
  /// whose terms individually extend to infinity but cancel.
  Rect support() const {
    if (support_override_) return *support_override_;
    if (terms_.empty()) return {0, 0, 0, 0};
    constexpr double inf = std::numeric_limits<double>::infinity();
    Rect r{inf, -inf, inf, -inf};
    for (const Term& t : terms_) {
      r.u_min = std::min(r.u_min, t.u.support().lo);
      r.u_max = std::max(r.u_max, t.u.support().hi);
      r.v_min = std::min(r.v_min, t.v.support().lo);
      r.v_max = std::max(r.v_max, t.v.support().hi);
    }
    return r;
  }

  TestFunction2D with_support(const Rect& r) const {
    TestFunction2D out = *this;
    out.support_override_ = r;
    return out;
  }

  /// Integral over the plane.
  double integral() const {
    double acc = 0;
    for (const Term& t : terms_) acc += t.u.integral() * t.v.integral();
    return acc;
  }

  /// v -> integral over u.
  Factor1D integrate_u() const {
    Factor1D out;
    for (const Term& t : terms_) out += t.v.scaled(t.u.integral());
    return out;
  }
  /// u -> integral over v.
  Factor1D integrate_v() const {
    Factor1D out;
    for (const Term& t : terms_) out += t.u.scaled(t.v.integral());
    return out;
  }

  TestFunction2D scaled(double c) const {
    TestFunction2D out = *this;
    for (Term& t : out.terms_) t.u = t.u.scaled(c);
    return out;
  }

  TestFunction2D& operator+=(const TestFunction2D& o) {
    if (terms_.empty()) return *this = o;
    if (o.terms_.empty()) return *this;
    const bool declared = support_override_.has_value() || o.support_override_.has_value();
    const Rect a = support(), b = o.support();
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    if (declared)
      support_override_ = Rect{std::min(a.u_min, b.u_min), std::max(a.u_max, b.u_max), std::min(a.v_min, b.v_min),
                               std::max(a.v_max, b.v_max)};
    return *this;
  }

  friend TestFunction2D operator+(TestFunction2D a, const TestFunction2D& b) { return a += b; }
  friend TestFunction2D operator-(TestFunction2D a, const TestFunction2D& b) { return a += b.scaled(-1); }

 private:
  std::vector<Term> terms_;
  std::optional<Rect> support_override_;
};

/// phi_1(u, v) = -phi_0(u) phi_0(v).
inline TestFunction2D phi1(const Bump1D& phi0) {
  return TestFunction2D::tensor(Factor1D::bump(phi0).scaled(-1), Factor1D::bump(phi0));
}

struct PsiEta {
  TestFunction2D psi;
  TestFunction2D eta;
};

namespace detail {

inline Rect hull(const Rect& a, const Rect& b) {
  return {std::min(a.u_min, b.u_min), std::max(a.u_max, b.u_max), std::min(a.v_min, b.v_min),
          std::max(a.v_max, b.v_max)};
}

inline void require_inside(const Rect& inner, const Rect& window, const char* what) {
  if (!(inner.u_min >= window.u_min && inner.u_max <= window.u_max && inner.v_min >= window.v_min &&
        inner.v_max <= window.v_max))
    throw MarginViolation(std::string(what) + " support leaves the working rectangle");
}

}  // namespace detail

/// psi(u,v) = phi(u,v) - phi_0(u) * int phi(s,v) ds, and
/// eta(u,v) = int_{-inf}^{u} phi(s,v) ds - (int phi(s,v) ds) * int_{-inf}^{u} phi_0(s) ds,
/// so that d eta/du = psi and both are compactly supported.
inline PsiEta build_psi_eta_1d(const TestFunction2D& phi, const Bump1D& phi0, const Rect& window) {
  const Rect phi_supp = phi.support();
  const Interval m = phi0.support();
  detail::require_inside(phi_supp, window, "phi");
  detail::require_inside({m.lo, m.hi, window.v_min, window.v_max}, window, "phi_0");

  const Factor1D mol = Factor1D::bump(phi0);
  const Factor1D line_mass = phi.integrate_u();  // v -> int phi(s, v) ds

  TestFunction2D psi = phi - TestFunction2D::tensor(mol, line_mass);

  TestFunction2D eta;
  for (const auto& t : phi.terms()) eta += TestFunction2D::tensor(t.u.antiderivative(), t.v);
  eta = eta - TestFunction2D::tensor(mol.antiderivative(), line_mass);

  const Rect supp{std::min(phi_supp.u_min, m.lo), std::max(phi_supp.u_max, m.hi), phi_supp.v_min, phi_supp.v_max};
  return {psi.with_support(supp), eta.with_support(supp)};
}

/// Mixed-derivative analogue:
///   psi = phi - phi_0(u) int phi(s,v) ds - phi_0(v) int phi(u,s) ds - phi_1(u,v) * iint phi,
///   eta = four-term double antiderivative with d^2 eta/du dv = psi.
inline PsiEta build_psi_eta_2d(const TestFunction2D& phi, const Bump1D& phi0, const Rect& window) {
  const Rect phi_supp = phi.support();
  const Interval m = phi0.support();
  detail::require_inside(phi_supp, window, "phi");
  detail::require_inside({m.lo, m.hi, m.lo, m.hi}, window, "phi_0");

  const Factor1D mol = Factor1D::bump(phi0);
  const Factor1D mol_cdf = mol.antiderivative();
  const Factor1D mass_over_u = phi.integrate_u();  // v -> int phi(s, v) ds
  const Factor1D mass_over_v = phi.integrate_v();  // u -> int phi(u, s) ds
  const double total = phi.integral();

  TestFunction2D psi = phi - TestFunction2D::tensor(mol, mass_over_u) - TestFunction2D::tensor(mass_over_v, mol) -
                       phi1(phi0).scaled(total);

  // int^u int^v phi
  TestFunction2D corner;
  for (const auto& t : phi.terms()) corner += TestFunction2D::tensor(t.u.antiderivative(), t.v.antiderivative());
  // int_R int^v phi, int^u int_R phi
  const TestFunction2D strip_v = TestFunction2D::tensor(mol_cdf, mass_over_u.antiderivative());
  const TestFunction2D strip_u = TestFunction2D::tensor(mass_over_v.antiderivative(), mol_cdf);
  // int^u int^v phi_1 = -Phi_0(u) Phi_0(v)
  const TestFunction2D phi1_corner = TestFunction2D::tensor(mol_cdf.scaled(-1), mol_cdf);

  TestFunction2D eta = corner - strip_v - strip_u - phi1_corner.scaled(total);

  const Rect supp = detail::hull(phi_supp, {m.lo, m.hi, m.lo, m.hi});
  return {psi.with_support(supp), eta.with_support(supp)};
}

}  // namespace causal2d
