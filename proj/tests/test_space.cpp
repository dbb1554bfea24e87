#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hardy/space.hpp"

using namespace hardy;

TEST(ParabolicDistance, Examples) {
  EXPECT_EQ(parabolic_distance(SpacePoint::make(0, 0), SpacePoint::make(0, 0)), 0.0);
  EXPECT_DOUBLE_EQ(parabolic_distance(SpacePoint::make(1, 0), SpacePoint::make(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(parabolic_distance(SpacePoint::make(0, 3, 4), SpacePoint::make(0, 0, 0)), 5.0);
  EXPECT_DOUBLE_EQ(parabolic_distance(SpacePoint::make(4, 1), SpacePoint::make(0, 0)), 2.0);
  EXPECT_THROW(parabolic_distance(SpacePoint::make(0, 0), SpacePoint::make(0, 0, 0)), std::invalid_argument);
}

TEST(ParabolicDistance, TriangleInequalityAndSymmetry) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int dim = 1; dim <= 2; ++dim) {
    for (int i = 0; i < 2000; ++i) {
      auto pt = [&] {
        return dim == 1 ? SpacePoint::make(u(rng), u(rng)) : SpacePoint::make(u(rng), u(rng), u(rng));
      };
      const auto p = pt(), q = pt(), r = pt();
      EXPECT_LE(parabolic_distance(p, r), parabolic_distance(p, q) + parabolic_distance(q, r) + 1e-12);
      EXPECT_DOUBLE_EQ(parabolic_distance(p, q), parabolic_distance(q, p));
    }
  }
}

TEST(BallVolume, Examples) {
  EXPECT_DOUBLE_EQ(ball_volume(ParabolicBall(SpacePoint::make(0, 0), 1)), 4.0);
  EXPECT_DOUBLE_EQ(ball_volume(ParabolicBall(SpacePoint::make(0, 0), 2)), 32.0);
  EXPECT_DOUBLE_EQ(ball_volume(ParabolicBall(SpacePoint::make(0, 0, 0), 2)), 32.0 * std::numbers::pi);
  EXPECT_THROW(ParabolicBall(SpacePoint::make(0, 0), 0.0), std::invalid_argument);
  EXPECT_THROW(ParabolicBall(SpacePoint::make(0, 0), -1.0), std::invalid_argument);
}

TEST(BallVolume, ExactDoubling) {
  for (int dim = 1; dim <= 2; ++dim) {
    const auto c = dim == 1 ? SpacePoint::make(3, 1) : SpacePoint::make(3, 1, -1);
    const ParabolicBall q(c, 0.7);
    for (double theta : {0.5, 1.0, 2.0, 3.7, 16.0}) {
      EXPECT_NEAR(ball_volume(dilate(q, theta)), std::pow(theta, dim + 2) * ball_volume(q),
                  1e-12 * ball_volume(dilate(q, theta)));
    }
  }
}

TEST(TruncatedVolume, Examples) {
  EXPECT_DOUBLE_EQ(truncated_volume(ParabolicBall(SpacePoint::make(4, 0), 1)), 4.0);
  EXPECT_DOUBLE_EQ(truncated_volume(ParabolicBall(SpacePoint::make(0, 0), 1)), 2.0);
  EXPECT_DOUBLE_EQ(truncated_volume(ParabolicBall(SpacePoint::make(-2, 0), 1)), 0.0);
}

TEST(TruncatedVolume, AtLeastHalfWhenCentredInX) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t(1e-6, 10.0), r(0.01, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const ParabolicBall q(SpacePoint::make(t(rng), 0.0), r(rng));
    EXPECT_GE(truncated_volume(q), 0.5 * ball_volume(q) * (1 - 1e-14));
  }
}

TEST(Containment, Examples) {
  auto c17 = contains_scaled(ParabolicBall(SpacePoint::make(17, 0), 1));
  EXPECT_TRUE(c17.quadruple_in_x);
  auto c5 = contains_scaled(ParabolicBall(SpacePoint::make(5, 0), 1));
  EXPECT_TRUE(c5.double_in_x);
  EXPECT_FALSE(c5.quadruple_in_x);
  auto c1 = contains_scaled(ParabolicBall(SpacePoint::make(1, 0), 1));
  EXPECT_FALSE(c1.double_in_x);
  // critical case counts as inside
  EXPECT_TRUE(contains_scaled(ParabolicBall(SpacePoint::make(16, 0), 1)).quadruple_in_x);
}

TEST(Annulus, Membership) {
  const ParabolicBall q(SpacePoint::make(20, 0), 1);
  EXPECT_TRUE(annulus_membership(q, 1, q.center()));
  // distance 3r: inside 4Q, so B_1 and not B_2
  const auto p3 = SpacePoint::make(20, 3);
  EXPECT_TRUE(annulus_membership(q, 1, p3));
  EXPECT_FALSE(annulus_membership(q, 2, p3));
  EXPECT_EQ(annulus_index(q, p3, 8), 1);
  const auto p5 = SpacePoint::make(20, 5);
  EXPECT_TRUE(annulus_membership(q, 2, p5));
  EXPECT_EQ(annulus_index(q, p5, 8), 2);
  const auto neg = SpacePoint::make(-0.5, 0);
  for (int j = 1; j <= 8; ++j) EXPECT_FALSE(annulus_membership(q, j, neg));
  EXPECT_EQ(annulus_index(q, neg, 8), 0);
}

TEST(Annulus, DirectDistanceOracle) {
  std::mt19937_64 rng(3);
  const ParabolicBall q(SpacePoint::make(2.0, 0.5), 0.75);
  std::uniform_real_distribution<double> t(-50, 200), x(-30, 30);
  for (int i = 0; i < 5000; ++i) {
    const auto p = SpacePoint::make(t(rng), x(rng));
    const double d = parabolic_distance(p, q.center()) / q.radius();
    for (int j = 1; j <= 5; ++j) {
      const double outer = std::pow(2.0, j + 1);
      const double inner = j == 1 ? 0.0 : std::pow(2.0, j);
      // open balls: inside theta Q iff both components strictly below
      const double dx = std::abs(p.x[0] - q.center().x[0]) / q.radius();
      const double dt = std::abs(p.t - q.center().t) / (q.radius() * q.radius());
      auto inside = [&](double th) { return dx < th && dt < th * th; };
      const bool expect = p.t > 0 && inside(outer) && (j == 1 || !inside(inner));
      EXPECT_EQ(annulus_membership(q, j, p), expect) << d;
    }
  }
}

TEST(Annulus, MeasuresPartition) {
  for (double t0 : {0.3, 2.0, 20.0}) {
    for (int dim = 1; dim <= 2; ++dim) {
      const auto c = dim == 1 ? SpacePoint::make(t0, 0) : SpacePoint::make(t0, 0, 0);
      const ParabolicBall q(c, 0.9);
      double sum = 0.0;
      for (int j = 1; j <= 8; ++j) {
        sum += annulus_measure(q, j);
        EXPECT_NEAR(sum, truncated_volume(dilate(q, std::pow(2.0, j + 1))), 1e-9 * sum);
      }
    }
  }
}
