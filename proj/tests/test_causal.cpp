#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "causal2d/causal.hpp"
#include "corpus.hpp"

using namespace causal2d;

namespace {

const Interval kI{-1, 1};
const Rect kSquare = Rect::make(-1, 1, -1, 1);

MonotoneMap1D fn(double (*f)(double)) { return MonotoneMap1D::from_function(f, kI); }

PlaneMap cubic_map() {
  return make_causal_iso(fn([](double u) { return u * u * u + u; }), fn([](double v) { return 2 * v + 1; }));
}
PlaneMap decreasing_map() {
  return make_causal_iso(fn([](double s) { return -s; }), fn([](double s) { return -s * s * s; }));
}
PlaneMap shear_map() {
  return PlaneMap([](double u, double v) { return Point{u + v, v}; },
                  [](double s, double t) { return Point{s - t, t}; }, kSquare, Rect::make(-2, 2, -1, 1));
}
PlaneMap identity_map() {
  return PlaneMap([](double u, double v) { return Point{u, v}; }, [](double s, double t) { return Point{s, t}; },
                  kSquare, kSquare);
}

struct Fixture {
  Grid2D grid = Grid2D::square(kSquare, 256);
  ProbeSet probes = ProbeSet::lattice(grid, 5, 5);
};

}  // namespace

TEST(MonotoneMap1D, InverseRoundTrip) {
  const auto m = fn([](double s) { return std::tanh(2 * s) + s; });
  EXPECT_EQ(m.direction(), Direction::increasing);
  for (double x = -1; x <= 1; x += 0.01) EXPECT_NEAR(m.inverse(m(x)), x, 1e-9 * kI.span());
  const auto t = MonotoneMap1D::from_table(SampledFunction1D({-1, 0, 1}, {3, 1, -2}));
  EXPECT_EQ(t.direction(), Direction::decreasing);
  for (double x = -1; x <= 1; x += 0.01) EXPECT_NEAR(t.inverse(t(x)), x, 1e-9 * kI.span());
}

TEST(MonotoneMap1D, RejectsNonStrict) {
  EXPECT_THROW(fn([](double s) { return s * s; }), NotHomeomorphism);
  EXPECT_THROW(fn([](double) { return 1.0; }), NotHomeomorphism);
  EXPECT_THROW(MonotoneMap1D::from_table(SampledFunction1D({0, 1, 2}, {0, 1, 1})), NotHomeomorphism);
}

TEST(MakeCausalIso, Layouts) {
  const PlaneMap F = cubic_map();
  const Point p = F(0.5, -0.25);
  EXPECT_DOUBLE_EQ(p.u, 0.625);
  EXPECT_DOUBLE_EQ(p.v, 0.5);
  EXPECT_EQ(F.kind(), PlaneMap::Kind::split_increasing);

  const PlaneMap G = decreasing_map();
  const Point q = G(0.5, -0.25);
  EXPECT_DOUBLE_EQ(q.u, 0.25);     // phi(v) = -v
  EXPECT_DOUBLE_EQ(q.v, -0.125);   // psi(u) = -u^3
  EXPECT_EQ(G.kind(), PlaneMap::Kind::split_decreasing_swapped);
}

TEST(MakeCausalIso, MixedDirectionsRejected) {
  EXPECT_THROW(make_causal_iso(fn([](double s) { return s; }), fn([](double s) { return -s; })),
               InvalidOrientationPair);
}

TEST(MakeCausalIso, InverseIsExact) {
  for (const PlaneMap& F : {cubic_map(), decreasing_map()}) {
    const auto h = check_homeomorphism(F);
    EXPECT_TRUE(h.ok);
    EXPECT_LT(h.roundtrip_error, 1e-6);
  }
}

TEST(OrderOracle, Examples) {
  EXPECT_EQ(order_oracle(identity_map(), 10000, 42), 0u);
  EXPECT_EQ(order_oracle(cubic_map(), 10000, 42), 0u);
  EXPECT_EQ(order_oracle(decreasing_map(), 10000, 42), 0u);
  const PlaneMap swap([](double u, double v) { return Point{v, u}; }, [](double s, double t) { return Point{t, s}; },
                      kSquare, kSquare);
  EXPECT_GT(order_oracle(swap, 10000, 42), 0u);
  EXPECT_EQ(order_oracle(shear_map(), 5000, 9), order_oracle(shear_map(), 5000, 9));
}

TEST(ClassifySplitForm, Examples) {
  Fixture fx;
  EXPECT_EQ(classify_split_form(cubic_map(), fx.grid, fx.probes).classification, Classification::split_increasing);
  EXPECT_EQ(classify_split_form(decreasing_map(), fx.grid, fx.probes).classification,
            Classification::split_decreasing_swapped);
  const SplitAnalysis shear = classify_split_form(shear_map(), fx.grid, fx.probes);
  EXPECT_EQ(shear.classification, Classification::not_split);
  EXPECT_GT(shear.sigma_dv, 0.1);
}

TEST(ClassifySplitForm, ConstantComponentIsNotBijective) {
  Fixture fx;
  const PlaneMap F([](double u, double) { return Point{u, 0.5}; }, [](double s, double) { return Point{s, 0}; },
                   kSquare, Rect::make(-1, 1, 0, 1));
  EXPECT_THROW(classify_split_form(F, fx.grid, fx.probes), NotBijective);
}

TEST(MonotonicityCheck, Conditions) {
  Fixture fx;
  EXPECT_EQ(monotonicity_check(classify_split_form(cubic_map(), fx.grid, fx.probes)), Condition::increasing_uv);
  EXPECT_EQ(monotonicity_check(classify_split_form(decreasing_map(), fx.grid, fx.probes)), Condition::decreasing_vu);
  const PlaneMap bad = PlaneMap::split_layout(fn([](double u) { return u * u * u; }), fn([](double v) { return -v; }),
                                              false);
  EXPECT_THROW(monotonicity_check(classify_split_form(bad, fx.grid, fx.probes)), NonMonotone);
  EXPECT_GT(order_oracle(bad, 10000, 42), 0u);
}

TEST(WaveInvariance, Examples) {
  Fixture fx;
  auto run = [&](const PlaneMap& F) {
    return wave_invariance_test(F, sample_map(F, fx.grid), fx.probes, Grid2D::square(F.codomain(), 256),
                                "lattice:5x5", 42);
  };
  const WaveInvariance id = run(identity_map());
  EXPECT_LT(id.forward, 1e-6);
  EXPECT_LT(id.backward, 1e-6);
  const WaveInvariance cubic = run(cubic_map());
  EXPECT_LT(cubic.forward, 1e-5);
  EXPECT_LT(cubic.backward, 1e-5);
  // pullback of sigma^2 = (u+v)^2 pairs to 2 int phi against the mixed derivative:
  // normalized by max (u+v)^2 = 4 this is exactly 1/2, so the bound holds only
  // up to the quadrature error of a 256 grid.
  const WaveInvariance shear = run(shear_map());
  double sigma_sq = 0;
  for (const auto& r : shear.records)
    if (r.name == "a^2") sigma_sq = r.forward;
  EXPECT_NEAR(sigma_sq, 0.5, 1e-6);
  EXPECT_GE(shear.forward, 0.5 - 1e-6);
}

TEST(Decide, Examples) {
  const CausalVerdict cubic = decide_causal_isomorphism(cubic_map());
  EXPECT_TRUE(cubic.is_causal_iso);
  ASSERT_TRUE(cubic.condition.has_value());
  EXPECT_EQ(*cubic.condition, Condition::increasing_uv);

  const CausalVerdict shear = decide_causal_isomorphism(shear_map());
  EXPECT_FALSE(shear.is_causal_iso);
  EXPECT_EQ(shear.classification, Classification::not_split);
  EXPECT_GE(shear.invariance_residual_forward, 0.5 - 1e-6);
  EXPECT_GT(shear.oracle_violations, 0u);

  const PlaneMap mixed = PlaneMap::split_layout(fn([](double u) { return u + 0.2 * u * u * u; }),
                                                fn([](double v) { return -std::exp(v); }), false);
  const CausalVerdict m = decide_causal_isomorphism(mixed);
  EXPECT_FALSE(m.is_causal_iso);
  EXPECT_EQ(m.classification, Classification::non_monotone);
  EXPECT_FALSE(m.condition.has_value());
  EXPECT_GT(m.oracle_violations, 0u);
}

TEST(Decide, NeverThrowsOnDegenerateInput) {
  const PlaneMap F([](double u, double) { return Point{u, 0.5}; }, [](double s, double) { return Point{s, 0}; },
                   kSquare, Rect::make(-1, 1, 0, 1));
  CausalVerdict v;
  EXPECT_NO_THROW(v = decide_causal_isomorphism(F));
  EXPECT_FALSE(v.is_causal_iso);
  EXPECT_FALSE(v.details.errors.empty());
}

TEST(Decide, ValidMapsHaveSymmetricInvariance) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 6; ++k) {
    const corpus::Case c = corpus::valid_case(rng, k);
    const CausalVerdict v = decide_causal_isomorphism(c.map);
    EXPECT_LT(v.invariance_residual_forward, kDefaultWeakTol) << c.label;
    EXPECT_LT(v.invariance_residual_backward, kDefaultWeakTol) << c.label;
    EXPECT_TRUE(v.is_causal_iso) << c.label;
  }
}

TEST(Decide, AffineRescalingKeepsVerdict) {
  const PlaneMap F = cubic_map();
  const PlaneMap G(
      [F](double u, double v) {
        const Point p = F(u, v);
        return Point{3 * p.u - 1, 0.5 * p.v + 2};
      },
      [F](double s, double t) { return F.inverse((s + 1) / 3, (t - 2) / 0.5); }, F.domain(),
      Rect::make(3 * F.codomain().u_min - 1, 3 * F.codomain().u_max - 1, 0.5 * F.codomain().v_min + 2,
                 0.5 * F.codomain().v_max + 2));
  EXPECT_TRUE(decide_causal_isomorphism(G).is_causal_iso);
}

TEST(Decide, CrossTermCorruptionIsRejected) {
  const PlaneMap::Fn f = [](double u, double v) { return Point{u * u * u + u + 0.1 * u * v, 2 * v + 1}; };
  const PlaneMap F(f, newton_inverse(f, kSquare), kSquare, image_bounds(f, kSquare));
  EXPECT_LT(check_homeomorphism(F).roundtrip_error, 1e-9);
  const CausalVerdict v = decide_causal_isomorphism(F);
  EXPECT_FALSE(v.is_causal_iso);
  EXPECT_GT(v.oracle_violations, 0u);
}

TEST(ClassifySplitForm, RoundTripRecoversFactors) {
  std::mt19937_64 rng(99);
  Fixture fx;
  for (int k = 0; k < 8; ++k) {
    const bool dec = k % 2 == 1;
    const corpus::Generated phi = corpus::random_monotone(rng, kI, dec);
    const corpus::Generated psi = corpus::random_monotone(rng, kI, dec);
    const SplitAnalysis a = classify_split_form(make_causal_iso(phi.phi, psi.phi), fx.grid, fx.probes);
    EXPECT_EQ(a.classification, dec ? Classification::split_decreasing_swapped : Classification::split_increasing);
    for (const auto& [got, want] : {std::pair{&a.phi, &phi.phi_fn}, std::pair{&a.psi, &psi.phi_fn}}) {
      const auto xs = got->coords(), ys = got->values();
      const double offset = ys[0] - (*want)(xs[0]);
      double worst = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(ys[i] - (*want)(xs[i]) - offset));
      EXPECT_LT(worst, 1e-5) << phi.name << "/" << psi.name;
    }
  }
}
