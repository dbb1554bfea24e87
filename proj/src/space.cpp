#include "hardy/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hardy {

void require_dim(int dim) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("spatial dimension must be 1 or 2, got " + std::to_string(dim));
  }
}

double unit_ball_volume(int dim) {
  require_dim(dim);
  return dim == 1 ? 2.0 : std::numbers::pi;
}

double parabolic_distance(const SpacePoint& p, const SpacePoint& q) {
  if (p.dim != q.dim) throw std::invalid_argument("parabolic_distance: dimension mismatch");
  double s = 0.0;
  for (int k = 0; k < p.dim; ++k) {
    const double d = p.x[k] - q.x[k];
    s += d * d;
  }
  return std::max(std::sqrt(s), std::sqrt(std::abs(p.t - q.t)));
}

ParabolicBall::ParabolicBall(const SpacePoint& center, double radius)
    : center_(center), radius_(radius) {
  require_dim(center.dim);
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ParabolicBall: radius must be positive and finite");
  }
}

bool ParabolicBall::contains(const SpacePoint& p) const {
  if (std::abs(p.t - center_.t) >= radius_ * radius_) return false;
  double s = 0.0;
  for (int k = 0; k < center_.dim; ++k) {
    const double d = p.x[k] - center_.x[k];
    s += d * d;
  }
  return s < radius_ * radius_;
}

double ball_volume(const ParabolicBall& q) {
  const double r = q.radius();
  return 2.0 * r * r * unit_ball_volume(q.dim()) * std::pow(r, q.dim());
}

namespace {

// Length of the part of (x0 - r, x0 + r) lying in (0, inf).
double clipped_interval(double x0, double r) {
  return std::max(0.0, x0 + r - std::max(0.0, x0 - r));
}

}  // namespace

double truncated_volume(const ParabolicBall& q, SpatialDomain domain) {
  const double r = q.radius();
  const double time_len = clipped_interval(q.center().t, r * r);
  double space = unit_ball_volume(q.dim()) * std::pow(r, q.dim());
  if (domain == SpatialDomain::half_line) {
    if (q.dim() != 1) throw std::invalid_argument("half-line domain requires dimension 1");
    space = clipped_interval(q.center().x[0], r);
  }
  return time_len * space;
}

ParabolicBall dilate(const ParabolicBall& q, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("dilate: factor must be positive");
  return ParabolicBall(q.center(), theta * q.radius());
}

bool scaled_inside_half_space(const ParabolicBall& q, double theta) {
  const double rr = theta * q.radius();
  return q.center().t - rr * rr >= 0.0;
}

Containment contains_scaled(const ParabolicBall& q) {
  return {scaled_inside_half_space(q, 2.0), scaled_inside_half_space(q, 4.0)};
}

bool annulus_membership(const ParabolicBall& q, int j, const SpacePoint& p) {
  if (j < 1) throw std::invalid_argument("annulus index must be >= 1");
  if (!p.in_half_space()) return false;
  const double outer = std::ldexp(q.radius(), j + 1);
  const double d = parabolic_distance(p, q.center());
  if (!(d < outer)) return false;
  if (j == 1) return true;
  return d >= std::ldexp(q.radius(), j);
}

double annulus_measure(const ParabolicBall& q, int j, SpatialDomain domain) {
  if (j < 1) throw std::invalid_argument("annulus index must be >= 1");
  const double outer = truncated_volume(dilate(q, std::ldexp(1.0, j + 1)), domain);
  if (j == 1) return outer;
  return outer - truncated_volume(dilate(q, std::ldexp(1.0, j)), domain);
}

int annulus_index(const ParabolicBall& q, const SpacePoint& p, int max_j) {
  if (!p.in_half_space()) return 0;
  const double ratio = parabolic_distance(p, q.center()) / q.radius();
  if (ratio < 4.0) return 1;
  // smallest j with ratio < 2^{j+1}
  int j = static_cast<int>(std::floor(std::log2(ratio)));
  // guard against rounding at exact powers of two
  while (j > 1 && ratio < std::ldexp(1.0, j)) --j;
  while (ratio >= std::ldexp(1.0, j + 1)) ++j;
  return j <= max_j ? j : 0;
}

}  // namespace hardy
