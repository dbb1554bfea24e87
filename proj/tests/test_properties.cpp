// Randomized invariants, swept over seeds.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hardy/decompose.hpp"
#include "hardy/heatop.hpp"

using namespace hardy;

namespace {

GridFunction noise(const SpaceTimeGrid& g, std::uint64_t seed, double radius, double t_max) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = g.cell_center(i);
    if (p.t < t_max && std::sqrt(p.spatial_norm2()) < radius) f[i] = n01(rng);
  }
  return f;
}

SpacePoint random_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  SpacePoint p;
  p.dim = dim;
  p.t = u(rng);
  for (int k = 0; k < dim; ++k) p.x[k] = u(rng);
  return p;
}

}  // namespace

class Seeded : public ::testing::TestWithParam<int> {
 protected:
  std::uint64_t seed() const { return static_cast<std::uint64_t>(GetParam()); }
};

TEST_P(Seeded, QuasiTriangleAndSymmetry) {
  std::mt19937_64 rng(seed());
  for (int k = 0; k < 200; ++k) {
    const int dim = 1 + k % 2;
    const auto a = random_point(rng, dim), b = random_point(rng, dim), c = random_point(rng, dim);
    EXPECT_DOUBLE_EQ(parabolic_distance(a, b), parabolic_distance(b, a));
    // max(|x|, |t|^{1/2}) is a metric: sqrt is subadditive
    EXPECT_LE(parabolic_distance(a, c), parabolic_distance(a, b) + parabolic_distance(b, c) + 1e-12);
  }
}

TEST_P(Seeded, BallVolumeScalesLikeHomogeneousDimension) {
  std::mt19937_64 rng(seed());
  std::uniform_real_distribution<double> r(0.1, 3.0), theta(1.0, 8.0);
  for (int dim : {1, 2}) {
    const ParabolicBall q(dim == 1 ? SpacePoint::make(0, 0) : SpacePoint::make(0, 0, 0), r(rng));
    const double s = theta(rng);
    EXPECT_NEAR(ball_volume(dilate(q, s)), std::pow(s, dim + 2) * ball_volume(q), 1e-10 * ball_volume(dilate(q, s)));
  }
}

TEST_P(Seeded, AnnuliTileTheDilatedBall) {
  std::mt19937_64 rng(seed());
  std::uniform_real_distribution<double> t0(-2.0, 30.0);
  const ParabolicBall q(SpacePoint::make(t0(rng), 0.5), 1.0);
  double total = 0.0;
  for (int j = 1; j <= 5; ++j) total += annulus_measure(q, j);
  EXPECT_NEAR(total, truncated_volume(dilate(q, 64.0)), 1e-9 * total);
}

TEST_P(Seeded, ApplyTIsLinear) {
  const SpaceTimeGrid g(1, 6.0, 0.25, 0.0, 4.0, 0.5);
  const auto f = noise(g, seed(), 3.0, 3.0), h = noise(g, seed() + 100, 3.0, 3.0);
  const double a = 0.7, b = -1.3;
  const auto lhs = apply_T(a * f + b * h, {});
  const auto rhs = a * apply_T(f, {}) + b * apply_T(h, {});
  EXPECT_LT(lp_norm(lhs - rhs, INFINITY), 1e-12 * (1.0 + lp_norm(lhs, INFINITY)));
}

TEST_P(Seeded, SpatialIntegralOfTfVanishesPerTime) {
  // the kernel is a time derivative of a probability density
  const SpaceTimeGrid g(1, 32.0, 0.25, 0.0, 4.0, 0.25);
  const auto tf = apply_T(noise(g, seed(), 2.0, 3.0), {});
  for (int k = 0; k < g.slabs(); ++k) {
    double sum = 0.0, abs_sum = 0.0;
    for (double v : tf.slab(k)) {
      sum += v;
      abs_sum += std::abs(v);
    }
    EXPECT_LE(std::abs(sum), 1e-10 * (abs_sum + 1.0)) << k;
  }
}

TEST_P(Seeded, TimeShiftCovariance) {
  const SpaceTimeGrid g(1, 6.0, 0.25, 0.0, 4.0, 0.5);
  const auto f = noise(g, seed(), 3.0, 2.0);
  GridFunction shifted(g);
  for (int k = 0; k + 2 < g.slabs(); ++k) {
    auto src = f.slab(k);
    auto dst = shifted.slab(k + 2);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  const auto a = apply_T(f, {}), b = apply_T(shifted, {});
  for (int k = 0; k + 2 < g.slabs(); ++k) {
    auto x = a.slab(k), y = b.slab(k + 2);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-12);
  }
}

TEST_P(Seeded, MadeAtomsValidateAnywhere) {
  std::mt19937_64 rng(seed());
  std::uniform_int_distribution<int> pick(-16, 16);
  const SpacePoint c = SpacePoint::make(20.0 + pick(rng) * 0.125, pick(rng) * 0.125);
  for (AtomKind kind : {AtomKind::classical_inf, AtomKind::type_a}) {
    const ParabolicBall q(c, 1.0);
    EXPECT_TRUE(validate_atom(make_atom(q, kind, rng()), q, kind).pass) << to_string(kind);
  }
}

TEST_P(Seeded, WhitneyCoverPartitionsStraddlingBalls) {
  std::mt19937_64 rng(seed());
  std::uniform_int_distribution<int> pick_t(-7, 7), pick_x(-16, 16);
  for (int dim : {1, 2}) {
    // the plane uses 4 cells per radius, so centres sit on multiples of 1/4
    const double s = dim == 1 ? 0.125 : 0.25;
    const int t = dim == 1 ? pick_t(rng) : pick_t(rng) / 2;
    const SpacePoint c = dim == 1 ? SpacePoint::make(t * s, pick_x(rng) * s)
                                  : SpacePoint::make(t * s, pick_x(rng) / 2 * s, pick_x(rng) / 2 * s);
    const ParabolicBall q(c, 1.0);
    const auto grid = half_space_grid(aligned_atom_grid(q, AtomKind::classical_2, dim == 1 ? 8 : 4));
    WhitneyParams wp;
    wp.t_floor = std::min(wp.t_floor, grid.slab_center(0));
    const auto st = cover_stats(whitney_cover(q, wp), q, grid);
    EXPECT_TRUE(st.covers);
    EXPECT_TRUE(st.partition);
    EXPECT_LE(st.max_overlap, dim == 1 ? 16 : 64);
  }
}

TEST_P(Seeded, RestrictionReconstructs) {
  std::mt19937_64 rng(seed());
  std::uniform_int_distribution<int> pick_t(-7, 7), pick_x(-16, 16);
  const ParabolicBall q(SpacePoint::make(pick_t(rng) * 0.125, pick_x(rng) * 0.125), 1.0);
  const auto a = make_atom(q, AtomKind::classical_2, rng());
  const auto d = restrict_decompose(a, q);
  const auto half = restrict_to_half_space(a);
  EXPECT_LE(d.residual, 1e-14 * lp_norm(half, 1));
  for (const auto& t : d.terms) EXPECT_TRUE(validate_atom(t.atom, t.ball, t.kind, 1e-9).pass);
}

TEST_P(Seeded, ExtensionsAndRefinementKeepIntegrals) {
  const SpaceTimeGrid g(1, 4.0, 0.25, 0.0, 3.0, 0.25);
  const auto f = noise(g, seed(), 3.0, 3.0);
  EXPECT_NEAR(integrate(even_extend(f)), 2.0 * integrate(f), 1e-12);
  EXPECT_NEAR(integrate(odd_extend(f)), 0.0, 1e-12);
  const auto r = refine(f, 2);
  EXPECT_NEAR(integrate(r), integrate(f), 1e-12);
  EXPECT_NEAR(lp_norm(r, 2), lp_norm(f, 2), 1e-12);
  EXPECT_NEAR(lp_norm(r, 3), lp_norm(f, 3), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Seeds, Seeded, ::testing::Range(1, 11));
