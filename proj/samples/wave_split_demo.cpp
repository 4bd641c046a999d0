// Splits a sampled solution of f_uv = 0 into left and right movers, then
// checks a monotone split map for causal order preservation.

#include <cmath>
#include <cstdio>

#include "causal2d/causal2d.hpp"

using namespace causal2d;

int main() {
  const Grid2D grid = Grid2D::square(Rect::make(-1, 1, -1, 1), 256);
  const auto f = SampledField2D::sample(grid, [](double u, double v) { return u * u * u - 2 * u + std::cos(v); });

  const ProbeSet probes = ProbeSet::lattice(grid, 5, 5);
  std::printf("weak_mixed residual of f:   %.3e\n", residual(weak_mixed(f), probes));

  const Separation s = additively_separate(f, mollifier(0, 0.5));
  std::printf("separation residual:        %.3e (c = %.6f)\n", s.residual, s.c);
  std::printf("alpha(0.5) - a(0.5):        %.9f\n", s.alpha(0.5) - (0.125 - 1));
  std::printf("beta(0.5) - b(0.5):         %.9f\n", s.beta(0.5) - std::cos(0.5));

  const Interval I{-1, 1};
  const PlaneMap F = make_causal_iso(MonotoneMap1D::from_function([](double u) { return u * u * u + u; }, I),
                                     MonotoneMap1D::from_function([](double v) { return 2 * v + 1; }, I));
  const CausalVerdict v = decide_causal_isomorphism(F);
  std::printf("(u^3+u, 2v+1): causal isomorphism = %s, %s, condition %s, oracle violations %zu\n",
              v.is_causal_iso ? "yes" : "no", to_string(v.classification).c_str(),
              v.condition ? to_string(*v.condition).c_str() : "-", v.oracle_violations);
}
