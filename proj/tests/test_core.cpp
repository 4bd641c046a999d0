#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "causal2d/core.hpp"
#include "causal2d/errors.hpp"

using namespace causal2d;

TEST(NullCoords, ToNullExamples) {
  auto a = to_null(1, 2);
  EXPECT_EQ(a.u, 3);
  EXPECT_EQ(a.v, 1);
  auto b = to_null(0, 0);
  EXPECT_EQ(b.u, 0);
  EXPECT_EQ(b.v, 0);
  auto c = to_null(2, -1);
  EXPECT_EQ(c.u, 1);
  EXPECT_EQ(c.v, -3);
}

TEST(NullCoords, FromNullExamples) {
  auto a = from_null(3, 1);
  EXPECT_EQ(a.t, 1);
  EXPECT_EQ(a.x, 2);
  auto b = from_null(1, -3);
  EXPECT_EQ(b.t, 2);
  EXPECT_EQ(b.x, -1);
}

TEST(NullCoords, RoundTripWithinFourUlps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-100, 100);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int k = 0; k < 10000; ++k) {
    const double t = d(rng), x = d(rng);
    const auto n = to_null(t, x);
    const auto back = from_null(n.u, n.v);
    const double scale = std::max(std::abs(t), std::abs(x));
    EXPECT_LE(std::abs(back.t - t), 4 * eps * scale);
    EXPECT_LE(std::abs(back.x - x), 4 * eps * scale);
  }
}

TEST(Event, ChartsAgree) {
  const Event e = Event::inertial(1, 2);
  EXPECT_EQ(e.u(), 3);
  EXPECT_EQ(e.v(), 1);
  const Event n = Event::null(3, 1);
  EXPECT_EQ(n.t(), 1);
  EXPECT_EQ(n.x(), 2);
}

TEST(CausalOrder, Examples) {
  EXPECT_TRUE(causal_leq(Event::inertial(0, 0), Event::inertial(1, 0.5)));
  EXPECT_TRUE(causal_leq(Event::inertial(0.3, -0.2), Event::inertial(0.3, -0.2)));
  EXPECT_FALSE(causal_leq(Event::inertial(0, 0), Event::inertial(1, 2)));
  // light-like separation is included
  EXPECT_TRUE(causal_leq(Event::inertial(0, 0), Event::inertial(1, 1)));
  EXPECT_TRUE(causal_leq(Event::inertial(0, 0), Event::inertial(1, -1)));
}

TEST(CausalOrder, InertialAndNullFormsAgree) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 10000; ++k) {
    const double t1 = d(rng), x1 = d(rng), t2 = d(rng), x2 = d(rng);
    const bool inertial = causal_leq(Event::inertial(t1, x1), Event::inertial(t2, x2));
    const auto p = to_null(t1, x1), q = to_null(t2, x2);
    const bool null_form = (q.u - p.u) >= 0 && (q.v - p.v) <= 0;
    EXPECT_EQ(inertial, null_form) << "pair " << k;
    EXPECT_EQ(inertial, causal_leq(Event::null(p.u, p.v), Event::null(q.u, q.v)));
  }
}

TEST(CausalOrder, IsPartialOrderOnSample) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<Event> ev;
  // a coarse lattice mixed in so that comparable and equal-coordinate pairs occur
  for (int k = 0; k < 150; ++k) ev.push_back(Event::null(d(rng), d(rng)));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 10; ++j) ev.push_back(Event::null(-1 + 0.5 * i, -1 + 0.25 * j));
  const std::size_t n = ev.size();
  std::vector<char> leq(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) leq[a * n + b] = causal_leq(ev[a], ev[b]);
  for (std::size_t a = 0; a < n; ++a) {
    EXPECT_TRUE(leq[a * n + a]);
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && leq[a * n + b] && leq[b * n + a])
        EXPECT_TRUE(ev[a].u() == ev[b].u() && ev[a].v() == ev[b].v());
      if (!leq[a * n + b]) continue;
      for (std::size_t c = 0; c < n; ++c)
        if (leq[b * n + c]) EXPECT_TRUE(leq[a * n + c]);
    }
  }
}

TEST(Rect, RejectsEmpty) {
  EXPECT_THROW(Rect::make(1, 1, 0, 1), InvalidArgument);
  EXPECT_THROW(Rect::make(0, 1, 2, -2), InvalidArgument);
  EXPECT_NO_THROW(Rect::make(0, 1, 0, 1));
}

TEST(Grid2D, SpacingAndNodes) {
  const Grid2D g(Rect::make(-1, 1, 0, 3), 5, 4);
  EXPECT_DOUBLE_EQ(g.du(), 0.5);
  EXPECT_DOUBLE_EQ(g.dv(), 1.0);
  EXPECT_EQ(g.u(0), -1);
  EXPECT_EQ(g.u(4), 1);
  EXPECT_EQ(g.v(3), 3);
  EXPECT_THROW(Grid2D(Rect::make(0, 1, 0, 1), 1, 4), InvalidArgument);
}

TEST(SampledField2D, NodesAndBilinear) {
  const Grid2D g(Rect::make(0, 1, 0, 1), 3, 3);
  const auto f = SampledField2D::sample(g, [](double u, double v) { return 2 * u + 3 * v + u * v; });
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(f(g.u(i), g.v(j)), f.at(i, j));
  // bilinear reproduces bilinear functions exactly
  EXPECT_NEAR(f(0.3, 0.7), 2 * 0.3 + 3 * 0.7 + 0.3 * 0.7, 1e-14);
  EXPECT_THROW(f(1.5, 0.5), InvalidArgument);
}

TEST(SampledField2D, RejectsNonFiniteAndWrongSize) {
  const Grid2D g(Rect::make(0, 1, 0, 1), 2, 2);
  EXPECT_THROW(SampledField2D(g, {1, 2, 3}), InvalidArgument);
  EXPECT_THROW(SampledField2D(g, {1, 2, 3, std::nan("")}), InvalidArgument);
}

TEST(SampledFunction1D, Interpolates) {
  const SampledFunction1D f({0, 1, 3}, {0, 2, 6});
  EXPECT_DOUBLE_EQ(f(0.5), 1);
  EXPECT_DOUBLE_EQ(f(2), 4);
  EXPECT_THROW(SampledFunction1D({0, 0, 1}, {1, 2, 3}), InvalidArgument);
}
