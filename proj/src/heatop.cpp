#include "hardy/heatop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardy/parallel.hpp"

namespace hardy {

void KernelSpec::validate() const {
  require_dim(dim);
  if (half_line() && dim != 1) throw std::invalid_argument("half-line kernels require dimension 1");
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw std::invalid_argument("tail_eps must lie in (0, 1)");
}

double heat_kernel(double t, double z2, int dim) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t must be positive");
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * dim) * std::exp(-z2 / (4.0 * t));
}

double heat_kernel_dt(double t, double z2, int dim) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel_dt: t must be positive");
  return heat_kernel(t, z2, dim) * (z2 / (4.0 * t * t) - dim / (2.0 * t));
}

namespace {

double dist2(const SpacePoint& x, const SpacePoint& y, double reflect_sign) {
  double s = 0.0;
  for (int k = 0; k < x.dim; ++k) {
    const double d = x.x[k] - (k == 0 ? reflect_sign : 1.0) * y.x[k];
    s += d * d;
  }
  return s;
}

template <class Kernel>
double image_sum(const KernelSpec& spec, double t, const SpacePoint& x, const SpacePoint& y, Kernel k) {
  spec.validate();
  const double direct = k(t, dist2(x, y, 1.0), spec.dim);
  switch (spec.boundary) {
    case Boundary::whole_space:
      return direct;
    case Boundary::half_line_dirichlet:
      return direct - k(t, dist2(x, y, -1.0), spec.dim);
    case Boundary::half_line_neumann:
      return direct + k(t, dist2(x, y, -1.0), spec.dim);
  }
  return direct;
}

}  // namespace

double heat_kernel(const KernelSpec& spec, double t, const SpacePoint& x, const SpacePoint& y) {
  return image_sum(spec, t, x, y, [](double s, double z2, int n) { return heat_kernel(s, z2, n); });
}

double heat_kernel_dt(const KernelSpec& spec, double t, const SpacePoint& x, const SpacePoint& y) {
  return image_sum(spec, t, x, y, [](double s, double z2, int n) { return heat_kernel_dt(s, z2, n); });
}

double gradient_l1(double t, const KernelSpec& spec) {
  spec.validate();
  if (!(t > 0.0)) throw std::invalid_argument("gradient_l1: t must be positive");
  if (spec.half_line()) throw std::invalid_argument("gradient_l1 is defined for the whole-space kernel");
  using boost::math::quadrature::gauss_kronrod;
  const int n = spec.dim;
  // |grad p_t(z)| = |z| / (2t) p_t(z), integrated radially.
  auto radial = [t, n](double r) {
    const double g = r / (2.0 * t) * heat_kernel(t, r * r, n);
    return n == 1 ? 2.0 * g : 2.0 * std::numbers::pi * r * g;
  };
  const double scale = std::sqrt(t);
  double total = 0.0;
  // split at a few kernel widths so the adaptive rule sees the bulk
  const double cuts[] = {0.0, 2.0 * scale, 6.0 * scale, 14.0 * scale};
  for (int i = 0; i + 1 < 4; ++i) {
    total += gauss_kronrod<double, 31>::integrate(radial, cuts[i], cuts[i + 1], 15, 1e-14);
  }
  total += gauss_kronrod<double, 31>::integrate(radial, cuts[3], std::numeric_limits<double>::infinity(), 15,
                                                1e-14);
  return total;
}

double tail_radius(double s, double eps) {
  if (s <= 0.0) return 0.0;
  return std::sqrt(4.0 * s * std::log(1.0 / eps));
}

double cell_tail(double z, double s) {
  if (s <= 0.0 || z == 0.0) return 0.0;
  const double v = 0.5 * std::erfc(std::abs(z) / std::sqrt(4.0 * s));
  return z > 0.0 ? -v : v;
}

Profile::Profile(SpatialGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw std::invalid_argument("Profile: value count mismatch");
}

double Profile::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_measure();
}

Profile slab_profile(const GridFunction& f, int k) {
  auto s = f.slab(k);
  return Profile(f.grid().space(), std::vector<double>(s.begin(), s.end()));
}

namespace {

// Offset weights of the operator e^{s1 Delta} - e^{s2 Delta} on a uniform
// grid: w[d + W] multiplies in[j] for out[j + d]. s2 == 0 is the identity;
// s2 < 0 drops the second operator.
struct OffsetKernel {
  int half = 0;
  std::vector<double> w;
};

// Cell-integrated weights of e^{s Delta} (s > 0) on offsets [-half, half],
// optionally composed with the sample correction 1 - delta^2/24.
std::vector<double> semigroup_weights(double s, double h, int half, bool corrected) {
  std::vector<double> w(2 * half + 1, 0.0);
  for (int d = -half; d <= half; ++d) {
    const double v = cell_tail(d * h + 0.5 * h, s) - cell_tail(d * h - 0.5 * h, s);
    w[d + half] = v + (d == 0 ? 1.0 : 0.0);
  }
  if (!corrected) return w;
  std::vector<double> c(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double left = i > 0 ? w[i - 1] : 0.0;
    const double right = i + 1 < w.size() ? w[i + 1] : 0.0;
    c[i] = w[i] - (left - 2.0 * w[i] + right) / 24.0;
  }
  return c;
}

OffsetKernel offset_kernel(double s1, double s2, double h, int cells, const KernelSpec& spec) {
  const bool corrected = spec.model == SampleModel::point_samples;
  OffsetKernel k;
  const double reach = tail_radius(std::max(s1, s2), spec.tail_eps);
  k.half = std::min(cells - 1, static_cast<int>(std::ceil(reach / h)) + 1 + (corrected ? 1 : 0));
  if (!corrected) {
    // direct difference of cell tails: no O(1) identity terms to cancel
    k.w.assign(2 * k.half + 1, 0.0);
    for (int d = -k.half; d <= k.half; ++d) {
      const double lo = d * h - 0.5 * h;
      const double hi = d * h + 0.5 * h;
      double v = cell_tail(hi, s1) - cell_tail(lo, s1);
      if (s2 >= 0.0) v -= cell_tail(hi, s2) - cell_tail(lo, s2);
      if (d == 0 && s2 < 0.0) v += 1.0;
      k.w[d + k.half] = v;
    }
    return k;
  }
  k.w = semigroup_weights(s1, h, k.half, true);
  if (s2 > 0.0) {
    const auto minus = semigroup_weights(s2, h, k.half, true);
    for (std::size_t i = 0; i < k.w.size(); ++i) k.w[i] -= minus[i];
  } else if (s2 == 0.0) {
    k.w[k.half] -= 1.0;
  }
  return k;
}

// out += K in along a strided line of length n.
void scatter(const OffsetKernel& k, const double* in, double* out, int n, std::ptrdiff_t stride) {
  const int half = k.half;
  const double* w = k.w.data();
  for (int j = 0; j < n; ++j) {
    const double v = in[j * stride];
    if (v == 0.0) continue;
    const int i0 = std::max(0, j - half);
    const int i1 = std::min(n - 1, j + half);
    const double* wj = w + (half - j);
    for (int i = i0; i <= i1; ++i) out[i * stride] += v * wj[i];
  }
}

void apply_kernel_1d(const OffsetKernel& k, std::span<const double> in, std::span<double> out) {
  scatter(k, in.data(), out.data(), static_cast<int>(in.size()), 1);
}

// Separable e^{s Delta} on a square two-dimensional profile.
std::vector<double> semigroup_2d(const OffsetKernel& k, std::span<const double> in, int cells) {
  const auto c = static_cast<std::size_t>(cells);
  std::vector<double> tmp(in.size(), 0.0);
  std::vector<double> out(in.size(), 0.0);
  for (std::size_t i = 0; i < c; ++i) scatter(k, in.data() + i * c, tmp.data() + i * c, cells, 1);
  for (std::size_t j = 0; j < c; ++j) {
    scatter(k, tmp.data() + j, out.data() + j, cells, static_cast<std::ptrdiff_t>(c));
  }
  return out;
}

void require_even_cells(const SpatialGrid& g) {
  if (g.cells_per_axis() % 2 != 0) {
    throw std::invalid_argument("half-line kernels require an even number of cells so that x = 0 is an edge");
  }
}

// Odd (Dirichlet) or even (Neumann) image extension across x = 0.
std::vector<double> image_extend(std::span<const double> v, Boundary b) {
  std::vector<double> e(v.begin(), v.end());
  const std::size_t n = e.size();
  const double sign = b == Boundary::half_line_dirichlet ? -1.0 : 1.0;
  for (std::size_t i = 0; i < n / 2; ++i) e[i] = sign * e[n - 1 - i];
  return e;
}

void clear_negative_half(std::span<double> v) {
  std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), 0.0);
}

void check_operator_input(const GridFunction& f, const KernelSpec& spec) {
  spec.validate();
  if (f.grid().dim() != spec.dim) throw std::invalid_argument("kernel dimension differs from the grid");
  if (f.grid().t_lo() < 0.0) throw std::invalid_argument("operator input must live on X (t_lo >= 0)");
  if (spec.half_line()) require_even_cells(f.grid().space());
}

// Shared driver: forward sums slabs k <= m with lag m - k, adjoint sums
// k >= m with lag k - m. The lag-l operator is
//   l = 0: e^{tau/2 Delta} - I,   l >= 1: e^{(l+1/2)tau Delta} - e^{(l-1/2)tau Delta}.
GridFunction apply_slab_operator(const GridFunction& f, const KernelSpec& spec, bool forward) {
  check_operator_input(f, spec);
  const auto& grid = f.grid();
  const int slabs = grid.slabs();
  const int cells = grid.space().cells_per_axis();
  const double h = grid.space().step();
  const double tau = grid.tau();

  std::vector<std::vector<double>> inputs(slabs);
  std::vector<char> active(slabs, 0);
  for (int k = 0; k < slabs; ++k) {
    auto s = f.slab(k);
    active[k] = std::any_of(s.begin(), s.end(), [](double v) { return v != 0.0; }) ? 1 : 0;
    if (!active[k]) continue;
    inputs[k] = spec.half_line() ? image_extend(s, spec.boundary) : std::vector<double>(s.begin(), s.end());
  }

  auto lag_times = [tau](int lag) {
    return lag == 0 ? std::pair{0.5 * tau, 0.0} : std::pair{(lag + 0.5) * tau, (lag - 0.5) * tau};
  };

  GridFunction out(grid);
  if (spec.dim == 1) {
    std::vector<OffsetKernel> kernels(slabs);
    for (int lag = 0; lag < slabs; ++lag) {
      const auto [s1, s2] = lag_times(lag);
      kernels[lag] = offset_kernel(s1, s2, h, cells, spec);
    }
    parallel_for(static_cast<std::size_t>(slabs), [&](std::size_t mi) {
      const int m = static_cast<int>(mi);
      auto dst = out.slab(m);
      const int k0 = forward ? 0 : m;
      const int k1 = forward ? m : slabs - 1;
      for (int k = k0; k <= k1; ++k) {
        if (!active[k]) continue;
        apply_kernel_1d(kernels[forward ? m - k : k - m], inputs[k], dst);
      }
      if (spec.half_line()) clear_negative_half(dst);
    });
    return out;
  }

  std::vector<OffsetKernel> semigroups(slabs + 1);
  for (int l = 0; l <= slabs; ++l) semigroups[l] = offset_kernel((l + 0.5) * tau, -1.0, h, cells, spec);
  parallel_for(static_cast<std::size_t>(slabs), [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    auto dst = out.slab(m);
    const int k0 = forward ? 0 : m;
    const int k1 = forward ? m : slabs - 1;
    for (int k = k0; k <= k1; ++k) {
      if (!active[k]) continue;
      const int lag = forward ? m - k : k - m;
      const auto plus = semigroup_2d(semigroups[lag], inputs[k], cells);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += plus[i];
      if (lag == 0) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= inputs[k][i];
      } else {
        const auto minus = semigroup_2d(semigroups[lag - 1], inputs[k], cells);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= minus[i];
      }
    }
  });
  return out;
}

}  // namespace

Profile semigroup_apply(const Profile& g, double t, const KernelSpec& spec) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: t must be nonnegative");
  if (g.grid.dim() != spec.dim) throw std::invalid_argument("kernel dimension differs from the profile");
  if (spec.half_line()) require_even_cells(g.grid);
  if (t == 0.0) {
    Profile out = g;
    if (spec.half_line()) clear_negative_half(out.values);
    return out;
  }
  const int cells = g.grid.cells_per_axis();
  const auto k = offset_kernel(t, -1.0, g.grid.step(), cells, spec);
  const std::vector<double> in = spec.half_line() ? image_extend(g.values, spec.boundary) : g.values;
  Profile out(g.grid);
  if (spec.dim == 1) {
    apply_kernel_1d(k, in, out.values);
  } else {
    out.values = semigroup_2d(k, in, cells);
  }
  if (spec.half_line()) clear_negative_half(out.values);
  return out;
}

GridFunction apply_T(const GridFunction& f, const KernelSpec& spec) {
  return apply_slab_operator(f, spec, true);
}

GridFunction apply_Tstar(const GridFunction& f, const KernelSpec& spec) {
  return apply_slab_operator(f, spec, false);
}

OperatorField::OperatorField(const GridFunction& f, KernelSpec spec, Direction direction)
    : spec_(spec), direction_(direction) {
  check_operator_input(f, spec_);
  if (spec_.model != SampleModel::cell_constant) {
    throw std::invalid_argument("OperatorField evaluates step-function inputs only");
  }
  const auto& grid = f.grid();
  const auto& space = grid.space();
  const int cells = space.cells_per_axis();
  step_ = space.step();
  bool first = true;
  for (int k = 0; k < grid.slabs(); ++k) {
    auto raw = f.slab(k);
    if (std::none_of(raw.begin(), raw.end(), [](double v) { return v != 0.0; })) continue;
    const std::vector<double> v =
        spec_.half_line() ? image_extend(raw, spec_.boundary) : std::vector<double>(raw.begin(), raw.end());
    Slab slab;
    slab.a = grid.slab_lo(k);
    slab.b = grid.slab_hi(k);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    if (spec_.dim == 1) {
      for (int e = 0; e <= cells; ++e) {
        const double left = e > 0 ? v[e - 1] : 0.0;
        const double right = e < cells ? v[e] : 0.0;
        if (right == left) continue;
        slab.edges.push_back(space.edge(e));
        slab.jumps.push_back(right - left);
        lo = std::min(lo, space.edge(e));
        hi = std::max(hi, space.edge(e));
      }
    } else {
      int i0 = cells, i1 = -1, j0 = cells, j1 = -1;
      for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
          if (v[static_cast<std::size_t>(i) * cells + j] == 0.0) continue;
          i0 = std::min(i0, i);
          i1 = std::max(i1, i);
          j0 = std::min(j0, j);
          j1 = std::max(j1, j);
        }
      }
      for (int i = i0; i <= i1; ++i) {
        slab.col_lo.push_back(space.edge(i));
        slab.col_hi.push_back(space.edge(i + 1));
      }
      for (int j = j0; j <= j1; ++j) {
        slab.row_lo.push_back(space.edge(j));
        slab.row_hi.push_back(space.edge(j + 1));
      }
      for (int i = i0; i <= i1; ++i) {
        for (int j = j0; j <= j1; ++j) slab.cells.push_back(v[static_cast<std::size_t>(i) * cells + j]);
      }
      lo = space.edge(i0);
      hi = space.edge(i1 + 1);
    }
    if (first) {
      t_lo_ = slab.a;
      x_lo_ = lo;
      x_hi_ = hi;
      first = false;
    }
    t_hi_ = slab.b;
    x_lo_ = std::min(x_lo_, lo);
    x_hi_ = std::max(x_hi_, hi);
    slabs_.push_back(std::move(slab));
  }
}

namespace {

// indicator of the open interval (lo, hi), one half on its endpoints
double interval_indicator(double x, double lo, double hi) {
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  return 0.5 * (sgn(x - lo) - sgn(x - hi));
}

}  // namespace

double OperatorField::difference(const Slab& slab, const SpacePoint& p, double s1, double s2) const {
  if (spec_.dim == 1) {
    const double x = p.x[0];
    double acc = 0.0;
    for (std::size_t e = 0; e < slab.edges.size(); ++e) {
      const double z = x - slab.edges[e];
      acc += slab.jumps[e] * (cell_tail(z, s1) - cell_tail(z, s2));
    }
    return acc;
  }
  const std::size_t nc = slab.col_lo.size();
  const std::size_t nr = slab.row_lo.size();
  std::vector<double> chi_x(nc), d1x(nc), d2x(nc), chi_y(nr), d1y(nr), d2y(nr);
  for (std::size_t i = 0; i < nc; ++i) {
    const double zl = p.x[0] - slab.col_lo[i];
    const double zh = p.x[0] - slab.col_hi[i];
    chi_x[i] = interval_indicator(p.x[0], slab.col_lo[i], slab.col_hi[i]);
    d1x[i] = cell_tail(zl, s1) - cell_tail(zh, s1);
    d2x[i] = cell_tail(zl, s2) - cell_tail(zh, s2);
  }
  for (std::size_t j = 0; j < nr; ++j) {
    const double zl = p.x[1] - slab.row_lo[j];
    const double zh = p.x[1] - slab.row_hi[j];
    chi_y[j] = interval_indicator(p.x[1], slab.row_lo[j], slab.row_hi[j]);
    d1y[j] = cell_tail(zl, s1) - cell_tail(zh, s1);
    d2y[j] = cell_tail(zl, s2) - cell_tail(zh, s2);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    const double dx = d1x[i] - d2x[i];
    for (std::size_t j = 0; j < nr; ++j) {
      const double g = slab.cells[i * nr + j];
      if (g == 0.0) continue;
      acc += g * (chi_x[i] * (d1y[j] - d2y[j]) + dx * chi_y[j] + d1x[i] * d1y[j] - d2x[i] * d2y[j]);
    }
  }
  return acc;
}

double OperatorField::operator()(const SpacePoint& p) const {
  if (p.dim != spec_.dim) throw std::invalid_argument("OperatorField: dimension mismatch");
  if (spec_.half_line() && !(p.x[0] > 0.0)) return 0.0;
  const double t = p.t;
  double acc = 0.0;
  for (const Slab& slab : slabs_) {
    if (direction_ == Direction::forward) {
      if (!(slab.a < t)) continue;
      acc += difference(slab, p, t - slab.a, slab.b <= t ? t - slab.b : 0.0);
    } else {
      if (!(slab.b > t)) continue;
      acc += difference(slab, p, slab.b - t, slab.a >= t ? slab.a - t : 0.0);
    }
  }
  return acc;
}

}  // namespace hardy
