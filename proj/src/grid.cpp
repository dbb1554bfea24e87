#include "hardy/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace hardy {

namespace {

int checked_count(double extent, double step, const char* what) {
  if (!(step > 0.0) || !(extent > 0.0) || !std::isfinite(extent) || !std::isfinite(step)) {
    throw std::invalid_argument(fmt::format("{}: extent and step must be positive", what));
  }
  const double ratio = extent / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) {
    throw std::invalid_argument(
        fmt::format("{}: extent {} is not an integer multiple of step {}", what, extent, step));
  }
  if (rounded > static_cast<double>(std::numeric_limits<int>::max())) {
    throw std::invalid_argument(fmt::format("{}: too many cells", what));
  }
  return static_cast<int>(rounded);
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grid functions live on different grids");
}

}  // namespace

SpatialGrid::SpatialGrid(int dim, double half_width, double step)
    : dim_(dim), half_width_(half_width), step_(step) {
  require_dim(dim);
  cells_ = checked_count(2.0 * half_width, step, "SpatialGrid");
}

std::size_t SpatialGrid::size() const {
  const auto c = static_cast<std::size_t>(cells_);
  return dim_ == 1 ? c : c * c;
}

double SpatialGrid::cell_measure() const { return std::pow(step_, dim_); }

int SpatialGrid::locate(double v) const {
  const double u = (v + half_width_) / step_;
  if (!(u >= 0.0) || u >= cells_) return -1;
  return static_cast<int>(u);
}

SpaceTimeGrid::SpaceTimeGrid(SpatialGrid space, double t_lo, double t_hi, double tau)
    : space_(space), t_lo_(t_lo), t_hi_(t_hi), tau_(tau) {
  if (!(t_hi > t_lo)) throw std::invalid_argument("SpaceTimeGrid: t_lo must be below t_hi");
  slabs_ = checked_count(t_hi - t_lo, tau, "SpaceTimeGrid");
}

SpacePoint SpaceTimeGrid::cell_center(std::size_t idx) const {
  const std::size_t per_slab = space_.size();
  const int k = static_cast<int>(idx / per_slab);
  const std::size_t rem = idx % per_slab;
  SpacePoint p;
  p.dim = space_.dim();
  p.t = slab_center(k);
  if (p.dim == 1) {
    p.x[0] = space_.center(static_cast<int>(rem));
  } else {
    const auto c = static_cast<std::size_t>(space_.cells_per_axis());
    p.x[0] = space_.center(static_cast<int>(rem / c));
    p.x[1] = space_.center(static_cast<int>(rem % c));
  }
  return p;
}

bool SpaceTimeGrid::covers(const ParabolicBall& q) const {
  if (q.dim() != dim()) return false;
  const double r = q.radius();
  for (int k = 0; k < dim(); ++k) {
    if (q.center().x[k] - r < -space_.half_width() || q.center().x[k] + r > space_.half_width()) {
      return false;
    }
  }
  const double lo = is_half_space() ? std::max(0.0, q.t_lo()) : q.t_lo();
  return lo >= t_lo_ && q.t_hi() <= t_hi_;
}

GridFunction::GridFunction(SpaceTimeGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(SpaceTimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("GridFunction: value count mismatch");
}

std::span<const double> GridFunction::slab(int k) const {
  return std::span<const double>(values_).subspan(k * grid_.slab_size(), grid_.slab_size());
}

std::span<double> GridFunction::slab(int k) {
  return std::span<double>(values_).subspan(k * grid_.slab_size(), grid_.slab_size());
}

GridFunction GridFunction::sample(const SpaceTimeGrid& grid,
                                  const std::function<double(const SpacePoint&)>& fn) {
  GridFunction f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f.values_[i] = fn(grid.cell_center(i));
  return f;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

bool GridFunction::support_within(const CellRegion& pred) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] != 0.0 && !pred(grid_.cell_center(i))) return false;
  }
  return true;
}

double integrate(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_measure();
}

double integrate(const GridFunction& f, const CellRegion& region) {
  double s = 0.0;
  const auto& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (region(g.cell_center(i))) s += f[i];
  }
  return s * g.cell_measure();
}

namespace {

double lp_accumulate(const GridFunction& f, double p, const CellRegion* region) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const auto& g = f.grid();
  const bool sup = std::isinf(p);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (region != nullptr && !(*region)(g.cell_center(i))) continue;
    const double a = std::abs(f[i]);
    if (sup) {
      acc = std::max(acc, a);
    } else if (p == 1.0) {
      acc += a;
    } else if (p == 2.0) {
      acc += a * a;
    } else {
      acc += std::pow(a, p);
    }
  }
  if (sup) return acc;
  return std::pow(acc * g.cell_measure(), 1.0 / p);
}

}  // namespace

double lp_norm(const GridFunction& f, double p) { return lp_accumulate(f, p, nullptr); }

double lp_norm(const GridFunction& f, double p, const CellRegion& region) {
  return lp_accumulate(f, p, &region);
}

double region_measure(const SpaceTimeGrid& grid, const CellRegion& region) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) count += region(grid.cell_center(i)) ? 1 : 0;
  return static_cast<double>(count) * grid.cell_measure();
}

SpaceTimeGrid reflected_grid(const SpaceTimeGrid& g) {
  if (!g.is_half_space()) throw std::invalid_argument("extension requires a grid starting at t = 0");
  return SpaceTimeGrid(g.space(), -g.t_hi(), g.t_hi(), g.tau());
}

SpaceTimeGrid half_space_grid(const SpaceTimeGrid& g) {
  if (!g.is_symmetric()) throw std::invalid_argument("restriction requires a grid symmetric about t = 0");
  return SpaceTimeGrid(g.space(), 0.0, g.t_hi(), g.tau());
}

namespace {

// sign_neg: factor applied to the mirrored copy on t < 0.
GridFunction extend(const GridFunction& f, double sign_neg) {
  const SpaceTimeGrid full = reflected_grid(f.grid());
  GridFunction out(full);
  const int m = f.grid().slabs();
  for (int k = 0; k < m; ++k) {
    auto src = f.slab(k);
    auto pos = out.slab(m + k);
    auto neg = out.slab(m - 1 - k);
    for (std::size_t i = 0; i < src.size(); ++i) {
      pos[i] = src[i];
      neg[i] = sign_neg * src[i];
    }
  }
  return out;
}

}  // namespace

GridFunction even_extend(const GridFunction& f) { return extend(f, 1.0); }
GridFunction odd_extend(const GridFunction& f) { return extend(f, -1.0); }
GridFunction zero_extend(const GridFunction& f) { return extend(f, 0.0); }

GridFunction restrict_to_half_space(const GridFunction& f) {
  const SpaceTimeGrid half = half_space_grid(f.grid());
  GridFunction out(half);
  const int m = half.slabs();
  for (int k = 0; k < m; ++k) {
    auto src = f.slab(m + k);
    std::copy(src.begin(), src.end(), out.slab(k).begin());
  }
  return out;
}

GridFunction time_reflect(const GridFunction& f) {
  if (!f.grid().is_symmetric()) throw std::invalid_argument("time_reflect requires a symmetric grid");
  GridFunction out(f.grid());
  const int s = f.grid().slabs();
  for (int k = 0; k < s; ++k) {
    auto src = f.slab(k);
    std::copy(src.begin(), src.end(), out.slab(s - 1 - k).begin());
  }
  return out;
}

GridFunction embed(const GridFunction& f, const SpaceTimeGrid& target) {
  const auto& src = f.grid();
  if (src.dim() != target.dim() || src.space().step() != target.space().step() || src.tau() != target.tau()) {
    throw std::invalid_argument("embed: grids differ in dimension, step or slab width");
  }
  const double h = src.space().step();
  const double shift_t = (src.t_lo() - target.t_lo()) / src.tau();
  const double shift_x = (target.space().half_width() - src.space().half_width()) / h;
  const long kt = std::lround(shift_t);
  const long kx = std::lround(shift_x);
  if (std::abs(shift_t - kt) > 1e-9 || std::abs(shift_x - kx) > 1e-9 || kt < 0 || kx < 0 ||
      kt + src.slabs() > target.slabs() || src.t_hi() > target.t_hi() + 1e-12) {
    throw std::invalid_argument("embed: source grid does not line up inside the target");
  }
  GridFunction out(target);
  const long nc = src.space().cells_per_axis();
  const long tc = target.space().cells_per_axis();
  for (int k = 0; k < src.slabs(); ++k) {
    auto from = f.slab(k);
    auto to = out.slab(static_cast<int>(k + kt));
    if (src.dim() == 1) {
      for (long i = 0; i < nc; ++i) to[i + kx] = from[i];
    } else {
      for (long i = 0; i < nc; ++i) {
        for (long j = 0; j < nc; ++j) to[(i + kx) * tc + (j + kx)] = from[i * nc + j];
      }
    }
  }
  return out;
}

GridFunction refine(const GridFunction& f, int factor) {
  if (factor < 1) throw std::invalid_argument("refine: factor must be positive");
  const auto& g = f.grid();
  const SpaceTimeGrid fine(g.dim(), g.space().half_width(), g.space().step() / factor, g.t_lo(), g.t_hi(),
                           g.tau() / factor);
  GridFunction out(fine);
  const int nc = g.space().cells_per_axis();
  const int fc = fine.space().cells_per_axis();
  for (int k = 0; k < fine.slabs(); ++k) {
    auto from = f.slab(k / factor);
    auto to = out.slab(k);
    if (g.dim() == 1) {
      for (int i = 0; i < fc; ++i) to[i] = from[i / factor];
    } else {
      for (int i = 0; i < fc; ++i) {
        for (int j = 0; j < fc; ++j) to[static_cast<std::size_t>(i) * fc + j] = from[static_cast<std::size_t>(i / factor) * nc + j / factor];
      }
    }
  }
  return out;
}

namespace {

void put_f64(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

double get_f64(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("read_binary: truncated input");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_binary(const GridFunction& f, std::ostream& os) {
  const auto& g = f.grid();
  put_f64(os, static_cast<double>(g.dim()));
  put_f64(os, g.space().half_width());
  put_f64(os, g.space().step());
  put_f64(os, g.t_lo());
  put_f64(os, g.t_hi());
  put_f64(os, g.tau());
  for (double v : f.values()) put_f64(os, v);
}

GridFunction read_binary(std::istream& is) {
  const double n = get_f64(is);
  const double half_width = get_f64(is);
  const double step = get_f64(is);
  const double t_lo = get_f64(is);
  const double t_hi = get_f64(is);
  const double tau = get_f64(is);
  SpaceTimeGrid grid(static_cast<int>(n), half_width, step, t_lo, t_hi, tau);
  std::vector<double> values(grid.size());
  for (double& v : values) v = get_f64(is);
  return GridFunction(grid, std::move(values));
}

void write_binary(const GridFunction& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_binary(f, os);
}

GridFunction read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_binary(is);
}

void write_csv(const GridFunction& f, std::ostream& os) {
  const auto& g = f.grid();
  os << (g.dim() == 1 ? "t,x,value\r\n" : "t,x1,x2,value\r\n");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const SpacePoint p = g.cell_center(i);
    if (g.dim() == 1) {
      os << fmt::format("{},{},{}\r\n", p.t, p.x[0], f[i]);
    } else {
      os << fmt::format("{},{},{},{}\r\n", p.t, p.x[0], p.x[1], f[i]);
    }
  }
}

}  // namespace hardy
