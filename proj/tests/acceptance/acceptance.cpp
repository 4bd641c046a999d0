// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "causal2d/causal2d.hpp"
#include "corpus.hpp"
#include "oracles.hpp"

using namespace causal2d;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const Rect kSquare = Rect::make(-1, 1, -1, 1);

int failures = 0;

void report(int n, const char* title, bool ok, const std::string& detail) {
  std::printf("%s  %d. %s: %s\n", ok ? "PASS" : "FAIL", n, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0, double e = 0) {
  char buf[320];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
  return buf;
}

using Fn1 = std::function<double(double)>;

// a(u) from {cubic polynomial, sin, exp, shifted |.|}
Fn1 random_1d(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1, 1);
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: {
      const double c0 = U(rng), c1 = U(rng), c2 = U(rng), c3 = U(rng);
      return [=](double x) { return c0 + x * (c1 + x * (c2 + x * c3)); };
    }
    case 1: {
      const double k = 1 + 2 * std::abs(U(rng)), p = U(rng);
      return [=](double x) { return std::sin(k * x + p); };
    }
    case 2: {
      const double k = U(rng);
      return [=](double x) { return std::exp(k * x); };
    }
    default: {
      const double s = 0.8 * U(rng);
      return [=](double x) { return std::abs(x - s); };
    }
  }
}

double spread(const std::vector<double>& xs) {
  double lo = xs.front(), hi = xs.front();
  for (double x : xs) lo = std::min(lo, x), hi = std::max(hi, x);
  return hi - lo;
}

double mean(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

void criterion_1() {
  const Grid2D grid = Grid2D::square(kSquare, 256);
  const Bump1D phi0 = mollifier(0, 0.5);
  std::mt19937_64 rng(42);
  double worst_res = 0, worst_gauge = 0, worst_time = 0;
  for (int k = 0; k < 20; ++k) {
    const Fn1 a = random_1d(rng), b = random_1d(rng);
    const auto f = SampledField2D::sample(grid, [&](double u, double v) { return a(u) + b(v); });
    const auto t0 = Clock::now();
    const Separation s = additively_separate(f, phi0);
    worst_time = std::max(worst_time, seconds_since(t0));
    std::vector<double> da, db;
    for (std::size_t i = 0; i < grid.nu(); ++i) da.push_back(s.alpha.values()[i] - a(grid.u(i)));
    for (std::size_t j = 0; j < grid.nv(); ++j) db.push_back(s.beta.values()[j] - b(grid.v(j)));
    worst_res = std::max(worst_res, s.residual);
    worst_gauge = std::max({worst_gauge, spread(da), spread(db), std::abs(mean(da) + mean(db))});
  }
  report(1, "separation fidelity", worst_res < 1e-6 && worst_gauge < 1e-5 && worst_time < 1,
         fmt("max residual %.2e (< 1e-6), gauge mismatch %.2e (< 1e-5), slowest %.3f s (< 1 s)", worst_res, worst_gauge,
             worst_time));
}

void criterion_2() {
  const Grid2D grid = Grid2D::square(kSquare, 256);
  const ProbeSet probes = ProbeSet::lattice(grid, 5, 5);
  const Bump1D phi0 = mollifier(0, 0.5);
  const auto uv = SampledField2D::sample(grid, [](double u, double v) { return u * v; });
  const auto euv = SampledField2D::sample(grid, [](double u, double v) { return std::exp(u * v); });
  const double s1 = additively_separate(uv, phi0).residual, s2 = additively_separate(euv, phi0).residual;
  const double w1 = residual(weak_mixed(uv), probes), w2 = residual(weak_mixed(euv), probes);
  report(2, "separation refutation", std::min({s1, s2, w1, w2}) >= 0.1,
         fmt("uv: residual %.3f, weak_mixed %.3f; exp(uv): residual %.3f, weak_mixed %.3f (all >= 0.1)", s1, w1, s2,
             w2));
}

void criterion_3() {
  const Grid2D grid = Grid2D::square(kSquare, 256);
  const ProbeSet probes = ProbeSet::lattice(grid, 5, 5);
  using F2 = double (*)(double, double);
  const std::vector<std::pair<F2, F2>> cases = {
      {[](double u, double) { return u * u * u; }, [](double u, double) { return 3 * u * u; }},
      {[](double, double v) { return std::sin(v); }, [](double, double) { return 0.0; }},
      {[](double u, double v) { return u * v; }, [](double, double v) { return v; }},
      {[](double u, double v) { return std::exp(u) * std::cos(v); }, [](double u, double v) { return std::exp(u) * std::cos(v); }},
      {[](double u, double) { return std::sin(3 * u); }, [](double u, double) { return 3 * std::cos(3 * u); }},
      {[](double u, double v) { return std::tanh(u + v); },
       [](double u, double v) { return 1 - std::tanh(u + v) * std::tanh(u + v); }},
      {[](double u, double v) { return u * u * v * v; }, [](double u, double v) { return 2 * u * v * v; }},
      {[](double u, double v) { return std::sqrt(1 + u * u + v * v); },
       [](double u, double v) { return u / std::sqrt(1 + u * u + v * v); }},
      {[](double u, double v) { return std::exp(-u * u) * v; }, [](double u, double v) { return -2 * u * std::exp(-u * u) * v; }},
      {[](double u, double v) { return 1 / (2 + u) + v; }, [](double u, double) { return -1 / ((2 + u) * (2 + u)); }},
  };
  double worst_agree = 0;
  for (const auto& [f, g] : cases)
    worst_agree = std::max(worst_agree, classical_weak_agreement(SampledField2D::sample(grid, f),
                                                                 SampledField2D::sample(grid, g), probes));

  // |u| against int int sign(u) phi, reference by adaptive quadrature of the 1-D factors
  const auto absu = SampledField2D::sample(grid, [](double u, double) { return std::abs(u); });
  const WeakFunctional d = weak_du(absu);
  double worst_abs = 0;
  for (const auto& phi : probes.probes()) {
    const Bump1D a = phi.terms().front().u.atoms().front().bump, b = phi.terms().front().v.atoms().front().bump;
    const oracle::Bump ra{a.center, a.radius, a.amplitude}, rb{b.center, b.radius, b.amplitude};
    const double su = oracle::integrate_robust(ra, std::max(0.0, ra.lo()), std::max(0.0, ra.hi())) -
                      oracle::integrate_robust(ra, std::min(0.0, ra.lo()), std::min(0.0, ra.hi()));
    const double ref = su * oracle::integrate(rb, rb.lo(), rb.hi());
    worst_abs = std::max(worst_abs, std::abs(d(phi) - ref));
  }
  report(3, "weak-derivative bridge", worst_agree < 1e-6 && worst_abs < 1e-6,
         fmt("classical/weak agreement %.2e over 10 fields (< 1e-6); |u| vs sign pairing %.3e (< 1e-6)", worst_agree,
             worst_abs));
}

void criterion_4() {
  auto cone = [](double u, double v) { return std::sqrt(u * u + v * v); };
  const Grid2D g256 = Grid2D::square(kSquare, 256), g512 = Grid2D::square(kSquare, 512);
  const auto f = SampledField2D::sample(g256, cone), f2 = SampledField2D::sample(g512, cone);
  // the same probe functions on both grids, so only the quadrature changes
  const ProbeSet p256 = ProbeSet::lattice(g256, 5, 5, 0.5), p512(p256.probes(), g512);
  double worst_order = 0;
  for (const auto& phi : p256.probes())
    worst_order = std::max(worst_order, std::abs(pair(f, phi.derivative_u().derivative_v()) -
                                                 pair(f, phi.derivative_v().derivative_u())));
  const double r1 = residual(weak_mixed(f), p256), r2 = residual(weak_mixed(f2), p512);
  const double rel = std::abs(r1 - r2) / std::max(std::abs(r2), 1e-300);
  report(4, "mixed-partial symmetry", worst_order < 1e-10 && rel < 1e-3,
         fmt("order difference %.2e (< 1e-10); weak_mixed residual %.6e at N=256, %.6e at N=512, relative change "
             "%.2e (< 1e-3)",
             worst_order, r1, r2, rel));
}

void criterion_5() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> c(-0.4, 0.4), r(0.15, 0.45), amp(-2, 2);
  const Bump1D phi0 = mollifier(0, 0.5);
  double worst_1d = 0, worst_2d = 0, worst_plain = 0, worst_out = 0;
  for (int k = 0; k < 10; ++k) {
    TestFunction2D phi = TestFunction2D::tensor(make_bump(c(rng), r(rng), amp(rng)), make_bump(c(rng), r(rng)));
    phi += TestFunction2D::tensor(make_bump(c(rng), r(rng)), make_bump(c(rng), r(rng), amp(rng)));
    const PsiEta p1 = build_psi_eta_1d(phi, phi0, kSquare), p2 = build_psi_eta_2d(phi, phi0, kSquare);
    // predicted supports, from the supports of phi and phi0 alone
    const Rect s = phi.support();
    const Rect pred1{std::min(s.u_min, -0.5), std::max(s.u_max, 0.5), s.v_min, s.v_max};
    const Rect pred2{std::min(s.u_min, -0.5), std::max(s.u_max, 0.5), std::min(s.v_min, -0.5), std::max(s.v_max, 0.5)};
    const double h1 = 1e-4, h2 = 1e-3;
    for (int i = 0; i <= 90; ++i)
      for (int j = 0; j <= 90; ++j) {
        const double u = -0.9 + 1.8 * i / 90, v = -0.9 + 1.8 * j / 90;
        const double fd1 = (p1.eta(u + h1, v) - p1.eta(u - h1, v)) / (2 * h1);
        worst_1d = std::max(worst_1d, std::abs(fd1 - p1.psi(u, v)));
        auto mixed = [&](double k) {
          return (p2.eta(u + k, v + k) - p2.eta(u + k, v - k) - p2.eta(u - k, v + k) + p2.eta(u - k, v - k)) /
                 (4 * k * k);
        };
        const double plain = mixed(h2), half = mixed(h2 / 2);
        worst_plain = std::max(worst_plain, std::abs(plain - p2.psi(u, v)));
        // one Richardson step removes the O(h^2) truncation term of the stencil
        worst_2d = std::max(worst_2d, std::abs((4 * half - plain) / 3 - p2.psi(u, v)));
      }
    for (int i = 0; i <= 120; ++i)
      for (int j = 0; j <= 120; ++j) {
        const double u = -1.2 + 2.4 * i / 120, v = -1.2 + 2.4 * j / 120;
        if (!pred1.contains(u, v)) worst_out = std::max(worst_out, std::abs(p1.eta(u, v)));
        if (!pred2.contains(u, v)) worst_out = std::max(worst_out, std::abs(p2.eta(u, v)));
      }
  }
  report(5, "auxiliary constructions", worst_1d < 1e-5 && worst_2d < 1e-5 && worst_out < 1e-12,
         fmt("max |d eta/du - psi| %.2e, max |d2 eta/du dv - psi| %.2e (< 1e-5; %.2e without extrapolation); "
             "max |eta| outside support %.2e (< 1e-12)",
             worst_1d, worst_2d, worst_plain, worst_out));
}

void criterion_6() {
  const auto t0 = Clock::now();
  const auto cases = corpus::build(42);
  int agree = 0, false_pos = 0, false_neg = 0;
  for (const auto& c : cases) {
    const CausalVerdict v = decide_causal_isomorphism(c.map);
    const bool truth = v.oracle_violations == 0;
    if (v.is_causal_iso == truth) ++agree;
    else if (v.is_causal_iso) ++false_pos;
    else ++false_neg;
    if (v.is_causal_iso != truth) std::printf("      disagreement: %s\n", c.label.c_str());
  }
  const double elapsed = seconds_since(t0);
  report(6, "characterization soundness", agree == static_cast<int>(cases.size()) && elapsed < 60,
         fmt("%.0f/%.0f agree with the order oracle, %.0f false positives, %.0f false negatives", agree,
             static_cast<double>(cases.size()), false_pos, false_neg) +
             fmt(", %.1f s (< 60 s)", elapsed));
}

void criterion_7() {
  std::mt19937_64 rng(42);
  const Interval I{-1, 1};
  const Grid2D grid = Grid2D::square(kSquare, 256);
  const ProbeSet probes = ProbeSet::lattice(grid, 5, 5);
  double worst = 0;
  int tags_ok = 0;
  for (int k = 0; k < 20; ++k) {
    const bool dec = k % 2 == 1;
    const corpus::Generated phi = corpus::random_monotone(rng, I, dec);
    const corpus::Generated psi = corpus::random_monotone(rng, I, dec);
    const SplitAnalysis a = classify_split_form(make_causal_iso(phi.phi, psi.phi), grid, probes);
    try {
      if (monotonicity_check(a) == (dec ? Condition::decreasing_vu : Condition::increasing_uv)) ++tags_ok;
    } catch (const NonMonotone&) {
    }
    for (const auto& [got, want] : {std::pair{&a.phi, &phi.phi_fn}, std::pair{&a.psi, &psi.phi_fn}}) {
      std::vector<double> d;
      for (std::size_t i = 0; i < got->size(); ++i) d.push_back(got->values()[i] - (*want)(got->coords()[i]));
      worst = std::max(worst, 0.5 * spread(d));  // after the best constant alignment
    }
  }
  report(7, "round-trip", worst < 1e-5 && tags_ok == 20,
         fmt("max deviation after constant alignment %.2e (< 1e-5); condition tags correct %.0f/20", worst, tags_ok));
}

void criterion_8() {
  // the unit mollifier on its own support [-1, 1]
  const Bump1D m = mollifier(0, 1);
  const auto nodes = Grid2D::square(kSquare, 128).u_nodes();
  const auto w = trapezoid_weights(nodes.size(), nodes[1] - nodes[0]);
  double mass = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) mass += w[k] * m(nodes[k]);

  const oracle::Bump b{0, 0.5};
  const double ref = oracle::against([](double u) { return std::exp(u); }, b, -0.5, 0.5) *
                     oracle::against([](double v) { return std::cos(v); }, b, -0.5, 0.5);
  auto err = [&](std::size_t n) {
    const auto f = SampledField2D::sample(Grid2D::square(kSquare, n),
                                          [](double u, double v) { return std::exp(u) * std::cos(v); });
    return std::abs(pair(f, TestFunction2D::tensor(make_bump(0, 0.5), make_bump(0, 0.5))) - ref);
  };
  const double e64 = err(64), e128 = err(128);
  const double ratio = e64 / std::max(e128, 1e-300);
  report(8, "quadrature quality", std::abs(mass - 1) < 1e-10 && ratio >= 16,
         fmt("|int phi0 - 1| = %.2e at N=128 (< 1e-10); pairing error %.2e at N=64, %.2e at N=128, ratio %.1f (>= 16)",
             std::abs(mass - 1), e64, e128, ratio));
}

void criterion_9() {
  const fs::path dir = fs::temp_directory_path() / "causal2d_acceptance";
  fs::create_directories(dir);
  const std::string map = std::string(CAUSAL2D_SAMPLES) + "/maps/cubic_split.json";
  auto run = [&](const std::string& out) {
    const std::string cmd = std::string("'") + CAUSAL2D_BIN + "' check-map '" + map + "' --deterministic --report '" +
                            (dir / out).string() + "' > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const int c1 = run("r1.json"), c2 = run("r2.json");
  const std::string a = io::read_text(dir / "r1.json"), b = io::read_text(dir / "r2.json");
  report(9, "determinism", c1 == 0 && c2 == 0 && a == b && !a.empty(),
         fmt("exit codes %.0f, %.0f; ", c1, c2) + (a == b ? "reports byte-identical" : "reports differ") +
             fmt(" (%.0f bytes)", static_cast<double>(a.size())));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                                       criterion_6, criterion_7, criterion_8, criterion_9};
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      report(static_cast<int>(k + 1), "criterion", false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
