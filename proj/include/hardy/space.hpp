#pragma once

// Parabolic geometry on N = R x R^n and the half-space X = (0, inf) x R^n.
//
// Balls are taken with respect to the parabolic quasi-distance
//   d((t,x),(s,y)) = max(|x - y|, |t - s|^{1/2}),
// so a ball of radius r is the product I(t0, r^2) x B(x0, r). All volumes are
// exact in the Euclidean model: nu(Q) = 2 r^2 * omega_n r^n.

#include <array>
#include <cstddef>

namespace hardy {

inline constexpr int kMaxDim = 2;

/// Euclidean volume of the unit ball in R^n (n = 1 or 2).
double unit_ball_volume(int dim);

void require_dim(int dim);

struct SpacePoint {
  double t = 0.0;
  std::array<double, kMaxDim> x{};
  int dim = 1;

  static SpacePoint make(double t, double x0) { return {t, {x0, 0.0}, 1}; }
  static SpacePoint make(double t, double x0, double x1) { return {t, {x0, x1}, 2}; }

  double spatial_norm2() const {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += x[k] * x[k];
    return s;
  }
  bool in_half_space() const { return t > 0.0; }
};

double parabolic_distance(const SpacePoint& p, const SpacePoint& q);

/// Spatial restriction used by the half-line boundary problems: Omega = R^n
/// or Omega = (0, inf) (dimension one only).
enum class SpatialDomain { whole, half_line };

class ParabolicBall {
 public:
  ParabolicBall(const SpacePoint& center, double radius);

  const SpacePoint& center() const { return center_; }
  double radius() const { return radius_; }
  int dim() const { return center_.dim; }

  /// Open-ball membership: |x - x0| < r and |t - t0| < r^2.
  bool contains(const SpacePoint& p) const;

  /// Time interval (t0 - r^2, t0 + r^2).
  double t_lo() const { return center_.t - radius_ * radius_; }
  double t_hi() const { return center_.t + radius_ * radius_; }

  bool inside_half_space() const { return t_lo() >= 0.0; }

 private:
  SpacePoint center_;
  double radius_;
};

double ball_volume(const ParabolicBall& q);

/// Exact measure of Q intersected with X (and with the spatial domain).
double truncated_volume(const ParabolicBall& q,
                        SpatialDomain domain = SpatialDomain::whole);

ParabolicBall dilate(const ParabolicBall& q, double theta);

struct Containment {
  bool double_in_x = false;     // 2Q subset of X
  bool quadruple_in_x = false;  // 4Q subset of X
};

/// theta Q is contained in X iff t0 - (theta r)^2 >= 0.
Containment contains_scaled(const ParabolicBall& q);
bool scaled_inside_half_space(const ParabolicBall& q, double theta);

/// B_1(Q) = 4Q cap X, B_j(Q) = (2^{j+1}Q \ 2^j Q) cap X for j >= 2.
bool annulus_membership(const ParabolicBall& q, int j, const SpacePoint& p);

/// Exact measure of B_j(Q).
double annulus_measure(const ParabolicBall& q, int j,
                       SpatialDomain domain = SpatialDomain::whole);

/// Index j >= 1 of the annulus containing p, or 0 when p lies in no B_j with
/// j <= max_j (outside X or beyond 2^{max_j + 1} Q).
int annulus_index(const ParabolicBall& q, const SpacePoint& p, int max_j);

}  // namespace hardy
