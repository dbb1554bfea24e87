#pragma once

// Heat kernel, heat semigroup and the maximal-regularity operators
//
//   T f(t)  = int_0^t   Delta e^{(t-s)Delta} f(s) ds,
//   T* f(t) = int_t^inf Delta e^{(s-t)Delta} f(s) ds,
//
// on X = (0, inf) x R^n, plus the half-line Dirichlet/Neumann variants built
// by the method of images.
//
// Inputs are piecewise constant in time, so each slab (a, b] with spatial
// profile g integrates exactly:
//   completed slab, t >= b:  e^{(t-a)Delta} g - e^{(t-b)Delta} g
//   active slab,  a < t < b: e^{(t-a)Delta} g - g
// and mirror-image expressions for T*. No time quadrature is involved.
//
// The semigroup acts on piecewise-constant spatial profiles through exact
// cell integrals of the Gaussian, written with
//   psi_s(z) = -sign(z) erfc(|z| / sqrt(4 s)) / 2,
// so that for a step function with jumps dg_e at edges e
//   (e^{s Delta} g)(x) - g(x) = sum_e dg_e psi_s(x - e).
// This form never subtracts O(1) quantities, so far-field values keep their
// relative accuracy.

#include <span>
#include <vector>

#include "hardy/grid.hpp"

namespace hardy {

enum class Boundary { whole_space, half_line_dirichlet, half_line_neumann };

// How grid values are read by the grid operators. cell_constant treats them
// as a step function and integrates the kernel exactly over cells (second
// order for smooth data, exact for step data). point_samples treats them as
// midpoint samples of a smooth function and composes every semigroup factor
// with the correction 1 - delta^2/24, which cancels the h^2 term of the cell
// integration (fourth order for smooth data).
enum class SampleModel { cell_constant, point_samples };

struct KernelSpec {
  int dim = 1;
  Boundary boundary = Boundary::whole_space;
  double tail_eps = 1e-12;
  SampleModel model = SampleModel::cell_constant;

  void validate() const;
  bool half_line() const { return boundary != Boundary::whole_space; }
};

/// p_t(z) = (4 pi t)^{-n/2} exp(-|z|^2 / 4t), as a function of |z|^2.
double heat_kernel(double t, double z2, int dim);
/// d/dt p_t(z) = (4 pi t)^{-n/2} (|z|^2/4t^2 - n/2t) exp(-|z|^2 / 4t).
double heat_kernel_dt(double t, double z2, int dim);
/// Kernel of e^{t Delta} for spec, evaluated at spatial points x, y. For the
/// half-line specs x, y > 0 and K = p(x - y) -/+ p(x + y).
double heat_kernel(const KernelSpec& spec, double t, const SpacePoint& x, const SpacePoint& y);
double heat_kernel_dt(const KernelSpec& spec, double t, const SpacePoint& x, const SpacePoint& y);

/// int |grad_z p_t(z)| dz computed by quadrature; equals c_n t^{-1/2}.
double gradient_l1(double t, const KernelSpec& spec);

/// Tail radius beyond which the Gaussian of e^{s Delta} carries less than eps.
double tail_radius(double s, double eps);

/// psi_s(z) as above; psi_s(0) = 0.
double cell_tail(double z, double s);

struct Profile {
  SpatialGrid grid;
  std::vector<double> values;

  explicit Profile(SpatialGrid g) : grid(g), values(g.size(), 0.0) {}
  Profile(SpatialGrid g, std::vector<double> v);
  double integral() const;
};

/// e^{t Delta} g sampled at the cell centres, for a piecewise-constant g.
/// For the half-line specs only cells with centre x > 0 are read or written.
Profile semigroup_apply(const Profile& g, double t, const KernelSpec& spec);

Profile slab_profile(const GridFunction& f, int k);

GridFunction apply_T(const GridFunction& f, const KernelSpec& spec);
GridFunction apply_Tstar(const GridFunction& f, const KernelSpec& spec);

/// Pointwise evaluation of T f or T* f at arbitrary space-time points, for
/// inputs with compact support (cell_constant model only). Used to sample outputs on grids unrelated to
/// the input grid (multiscale annulus sampling, far-field tails).
class OperatorField {
 public:
  enum class Direction { forward, adjoint };

  OperatorField(const GridFunction& f, KernelSpec spec, Direction direction);

  double operator()(const SpacePoint& p) const;
  double operator()(double t, double x) const { return (*this)(SpacePoint::make(t, x)); }

  Direction direction() const { return direction_; }
  const KernelSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  /// Time range of the input support: (first active slab start, last end].
  double support_t_lo() const { return t_lo_; }
  double support_t_hi() const { return t_hi_; }
  /// Smallest and largest spatial coordinate (axis 0) touched by the input.
  double support_x_lo() const { return x_lo_; }
  double support_x_hi() const { return x_hi_; }
  double input_step() const { return step_; }

 private:
  struct Slab {
    double a = 0.0;
    double b = 0.0;
    // dimension one: jump locations and sizes of the (image-extended) profile
    std::vector<double> edges;
    std::vector<double> jumps;
    // dimension two: bounding box of nonzero cells and row-major values
    std::vector<double> col_lo, col_hi, row_lo, row_hi;
    std::vector<double> cells;
  };

  // [e^{s1 Delta} - e^{s2 Delta}] g at x, s2 = 0 meaning the identity.
  double difference(const Slab& slab, const SpacePoint& p, double s1, double s2) const;

  KernelSpec spec_;
  Direction direction_;
  std::vector<Slab> slabs_;
  double t_lo_ = 0.0;
  double t_hi_ = 0.0;
  double x_lo_ = 0.0;
  double x_hi_ = 0.0;
  double step_ = 0.0;
};

}  // namespace hardy
