#include "hardy/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "hardy/parallel.hpp"

namespace hardy {

std::string to_string(AtomKind kind) {
  switch (kind) {
    case AtomKind::classical_inf: return "classical_inf";
    case AtomKind::classical_2: return "classical_2";
    case AtomKind::type_a: return "type_a";
    case AtomKind::type_b: return "type_b";
    case AtomKind::hardy_x: return "hardy_x";
  }
  return "unknown";
}

AtomKind atom_kind_from_string(const std::string& name) {
  for (auto k : {AtomKind::classical_inf, AtomKind::classical_2, AtomKind::type_a, AtomKind::type_b,
                 AtomKind::hardy_x}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown atom kind '" + name + "'");
}

double normalizing_volume(const ParabolicBall& q, AtomKind kind) {
  return kind == AtomKind::hardy_x ? truncated_volume(q) : ball_volume(q);
}

bool geometry_matches(const ParabolicBall& q, AtomKind kind) {
  const auto c = contains_scaled(q);
  switch (kind) {
    case AtomKind::classical_inf:
    case AtomKind::classical_2: return true;
    case AtomKind::type_a: return c.quadruple_in_x;
    case AtomKind::type_b: return c.double_in_x && !c.quadruple_in_x;
    case AtomKind::hardy_x: return q.center().t > 0.0;
  }
  return false;
}

namespace {

bool lives_on_x(AtomKind kind) {
  return kind == AtomKind::type_a || kind == AtomKind::type_b || kind == AtomKind::hardy_x;
}

void require_cover(const SpaceTimeGrid& grid, const ParabolicBall& q, const char* who) {
  if (!grid.covers(q)) {
    throw std::invalid_argument(fmt::format("{}: grid does not cover the ball (t0={}, r={})", who,
                                            q.center().t, q.radius()));
  }
}

bool is_multiple(double v, double step) {
  const double k = v / step;
  return std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, std::abs(k));
}

}  // namespace

AtomCertificate validate_atom(const GridFunction& f, const ParabolicBall& q, AtomKind kind, double tol) {
  if (f.grid().dim() != q.dim()) throw std::invalid_argument("validate_atom: dimension mismatch");
  require_cover(f.grid(), q, "validate_atom");
  AtomCertificate c;
  c.kind = kind;
  c.ball = q;
  c.tol = tol;
  c.geometry_ok = geometry_matches(q, kind);
  const bool need_x = lives_on_x(kind);
  c.support_ok = f.support_within([&](const SpacePoint& p) { return q.contains(p) && (!need_x || p.t > 0.0); });
  c.l2_norm = lp_norm(f, 2);
  const double vol = normalizing_volume(q, kind);
  c.size_slack = kind == AtomKind::classical_inf ? lp_norm(f, INFINITY) * vol : c.l2_norm * std::sqrt(vol);
  c.moment = integrate(f);
  c.moment_required = kind != AtomKind::type_b;
  c.moment_ratio = c.l2_norm > 0.0 ? std::abs(c.moment) / (std::sqrt(vol) * c.l2_norm) : 0.0;
  c.pass = c.geometry_ok && c.support_ok && c.size_slack <= 1.0 + tol &&
           (!c.moment_required || c.moment_ratio <= tol);
  return c;
}

SpaceTimeGrid aligned_atom_grid(const ParabolicBall& q, AtomKind kind, int cells_per_radius, double margin) {
  if (cells_per_radius < 1) throw std::invalid_argument("aligned_atom_grid: cells_per_radius must be positive");
  const double r = q.radius();
  const double h = r / cells_per_radius;
  const double tau = r * r / cells_per_radius;
  double reach = 0.0;
  for (int k = 0; k < q.dim(); ++k) {
    if (!is_multiple(q.center().x[k], h)) {
      throw std::invalid_argument("aligned_atom_grid: centre is not a multiple of the spatial step");
    }
    reach = std::max(reach, std::abs(q.center().x[k]));
  }
  const double top = q.t_hi();
  if (!is_multiple(top, tau)) throw std::invalid_argument("aligned_atom_grid: t0 + r^2 is not a slab edge");
  const double half_width = std::ceil((reach + (1.0 + margin) * r) / h - 1e-9) * h;
  if (lives_on_x(kind) || q.t_lo() >= 0.0) {
    if (!(top > 0.0)) throw std::invalid_argument("aligned_atom_grid: ball misses X");
    return SpaceTimeGrid(q.dim(), half_width, h, 0.0, top, tau);
  }
  const double t_hi = std::max(std::abs(q.t_lo()), std::abs(top));
  return SpaceTimeGrid(q.dim(), half_width, h, -t_hi, t_hi, tau);
}

GridFunction make_atom(const ParabolicBall& q, AtomKind kind, std::uint64_t seed, const SpaceTimeGrid& grid) {
  if (!geometry_matches(q, kind)) {
    throw std::invalid_argument(fmt::format("make_atom: ball (t0={}, r={}) does not suit kind {}", q.center().t,
                                            q.radius(), to_string(kind)));
  }
  if (grid.dim() != q.dim()) throw std::invalid_argument("make_atom: dimension mismatch");
  require_cover(grid, q, "make_atom");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  // coefficients of a cubic in (s, y1[, y2])
  std::vector<double> coef(20);
  for (double& c : coef) c = n01(rng);
  const double r = q.radius();
  const bool need_x = lives_on_x(kind);
  GridFunction f(grid);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const SpacePoint p = grid.cell_center(i);
    if (!q.contains(p) || (need_x && !(p.t > 0.0))) continue;
    const double s = (p.t - q.center().t) / (r * r);
    const double y1 = (p.x[0] - q.center().x[0]) / r;
    const double y2 = q.dim() == 2 ? (p.x[1] - q.center().x[1]) / r : 0.0;
    double v = 0.0;
    int idx = 0;
    for (int a = 0; a <= 3; ++a) {
      for (int b = 0; a + b <= 3; ++b) {
        for (int c = 0; a + b + c <= 3; ++c) {
          v += coef[idx++] * std::pow(s, a) * std::pow(y1, b) * std::pow(y2, c);
        }
      }
    }
    f[i] = v;
    support.push_back(i);
  }
  if (support.empty()) throw std::invalid_argument("make_atom: no grid cell centre lies in the ball");
  if (kind != AtomKind::type_b) {
    double mean = 0.0;
    for (auto i : support) mean += f[i];
    mean /= static_cast<double>(support.size());
    for (auto i : support) f[i] -= mean;
  }
  const double vol = normalizing_volume(q, kind);
  const double size = kind == AtomKind::classical_inf ? lp_norm(f, INFINITY) * vol : lp_norm(f, 2) * std::sqrt(vol);
  if (!(size > 0.0)) throw std::runtime_error("make_atom: degenerate profile");
  f *= 1.0 / size;
  return f;
}

GridFunction make_atom(const ParabolicBall& q, AtomKind kind, std::uint64_t seed) {
  return make_atom(q, kind, seed, aligned_atom_grid(q, kind));
}

bool MoleculeReport::certifies(double c, double moment_tol) const {
  for (std::size_t j = 0; j < weighted_norms.size(); ++j) {
    const double bound = c * std::pow(2.0, -alpha * static_cast<double>(j + 1));
    if (weighted_norms[j] > bound * (1.0 + 1e-12)) return false;
  }
  return std::abs(moment) <= moment_tol;
}

double fit_decay_exponent(const std::vector<double>& values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(values[j] > 0.0)) continue;
    const double x = static_cast<double>(j + 1);
    const double y = -std::log2(values[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::infinity();
  const double den = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / den;
}

namespace {

void finish_report(MoleculeReport& rep, const std::vector<double>& sq, SpatialDomain domain) {
  const int J = rep.annuli;
  rep.annulus_l2.assign(J, 0.0);
  rep.weighted_norms.assign(J, 0.0);
  rep.constant = 0.0;
  for (int j = 1; j <= J; ++j) {
    const double outer = truncated_volume(dilate(rep.ball, std::ldexp(1.0, j + 1)), domain);
    rep.annulus_l2[j - 1] = std::sqrt(sq[j - 1]);
    rep.weighted_norms[j - 1] = std::sqrt(outer) * rep.annulus_l2[j - 1];
    rep.constant = std::max(rep.constant, std::pow(2.0, j * rep.alpha) * rep.weighted_norms[j - 1]);
  }
  rep.fitted_alpha = fit_decay_exponent(rep.weighted_norms);
}

void check_report_args(const ParabolicBall& q, int annuli, SpatialDomain domain) {
  if (annuli < 1) throw std::invalid_argument("molecule_report: need at least one annulus");
  if (domain == SpatialDomain::half_line && q.dim() != 1) {
    throw std::invalid_argument("molecule_report: half-line domain requires dimension 1");
  }
}

}  // namespace

MoleculeReport molecule_report(const GridFunction& f, const ParabolicBall& q, double alpha, int annuli,
                               SpatialDomain domain) {
  check_report_args(q, annuli, domain);
  const ParabolicBall outer = dilate(q, std::ldexp(1.0, annuli + 1));
  if (!f.grid().covers(outer)) {
    throw std::invalid_argument(
        fmt::format("molecule_report: grid does not cover 2^{}Q cap X", annuli + 1));
  }
  MoleculeReport rep;
  rep.ball = q;
  rep.alpha = alpha;
  rep.annuli = annuli;
  std::vector<double> sq(annuli, 0.0);
  const auto& g = f.grid();
  const double cell = g.cell_measure();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const SpacePoint p = g.cell_center(i);
    if (domain == SpatialDomain::half_line && !(p.x[0] > 0.0)) continue;
    const int j = annulus_index(q, p, annuli);
    if (j == 0) continue;
    sq[j - 1] += f[i] * f[i] * cell;
    rep.moment += f[i] * cell;
    rep.l1_norm += std::abs(f[i]) * cell;
  }
  finish_report(rep, sq, domain);
  return rep;
}

namespace {

struct Cell1 {
  double mid;
  double width;
};

// Cells of [lo, lo + count*step], clipped to (0, inf) when clip is set.
std::vector<Cell1> axis_cells(double lo, double step, int count, bool clip) {
  std::vector<Cell1> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    double a = lo + i * step;
    const double b = lo + (i + 1) * step;
    if (clip) {
      if (b <= 0.0) continue;
      a = std::max(a, 0.0);
    }
    out.push_back({0.5 * (a + b), b - a});
  }
  return out;
}

}  // namespace

MoleculeReport molecule_report(const SpaceTimeField& f, const ParabolicBall& q, double alpha, int annuli,
                               SpatialDomain domain, const AnnulusSampling& sampling) {
  check_report_args(q, annuli, domain);
  MoleculeReport rep;
  rep.ball = q;
  rep.alpha = alpha;
  rep.annuli = annuli;
  std::vector<double> sq(annuli, 0.0);
  const double r = q.radius();
  const int dim = q.dim();
  const bool half_line = domain == SpatialDomain::half_line;
  for (int j = 1; j <= annuli; ++j) {
    const int cx = j == 1 ? sampling.first_cells_x : sampling.cells_x;
    const int ct = j == 1 ? sampling.first_cells_t : sampling.cells_t;
    const double reach = std::ldexp(r, j + 1);
    const double hx = std::ldexp(r, j) / cx;
    const double ht = std::ldexp(r * r, 2 * j) / ct;
    const auto times = axis_cells(q.center().t - reach * reach, ht, 8 * ct, true);
    const auto xs = axis_cells(q.center().x[0] - reach, hx, 4 * cx, half_line);
    const auto ys = dim == 2 ? axis_cells(q.center().x[1] - reach, hx, 4 * cx, false) : std::vector<Cell1>{{0.0, 1.0}};
    std::vector<double> part_sq(times.size(), 0.0), part_m(times.size(), 0.0), part_l1(times.size(), 0.0);
    parallel_for(times.size(), [&](std::size_t it) {
      const Cell1& tc = times[it];
      double s2 = 0.0, s1 = 0.0, sa = 0.0;
      for (const Cell1& xc : xs) {
        for (const Cell1& yc : ys) {
          SpacePoint p = dim == 1 ? SpacePoint::make(tc.mid, xc.mid) : SpacePoint::make(tc.mid, xc.mid, yc.mid);
          if (!annulus_membership(q, j, p)) continue;
          const double w = tc.width * xc.width * yc.width;
          const double v = f(p);
          s2 += v * v * w;
          s1 += v * w;
          sa += std::abs(v) * w;
        }
      }
      part_sq[it] = s2;
      part_m[it] = s1;
      part_l1[it] = sa;
    });
    for (std::size_t it = 0; it < times.size(); ++it) {
      sq[j - 1] += part_sq[it];
      rep.moment += part_m[it];
      rep.l1_norm += part_l1[it];
    }
  }
  finish_report(rep, sq, domain);
  return rep;
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json to_json(const SpacePoint& p) {
  nlohmann::json x = nlohmann::json::array();
  for (int k = 0; k < p.dim; ++k) x.push_back(p.x[k]);
  return {{"t", p.t}, {"x", x}};
}

nlohmann::json to_json(const ParabolicBall& q) {
  return {{"center", to_json(q.center())}, {"radius", q.radius()}, {"volume", ball_volume(q)}};
}

nlohmann::json to_json(const AtomCertificate& c) {
  return {{"kind", to_string(c.kind)},
          {"ball", to_json(c.ball)},
          {"tol", c.tol},
          {"geometry_ok", c.geometry_ok},
          {"support_ok", c.support_ok},
          {"size_slack", number(c.size_slack)},
          {"moment", number(c.moment)},
          {"moment_ratio", number(c.moment_ratio)},
          {"moment_required", c.moment_required},
          {"l2_norm", number(c.l2_norm)},
          {"pass", c.pass}};
}

nlohmann::json to_json(const MoleculeReport& r) {
  nlohmann::json m = nlohmann::json::array();
  for (double v : r.weighted_norms) m.push_back(number(v));
  return {{"ball", to_json(r.ball)},
          {"alpha", r.alpha},
          {"J", r.annuli},
          {"M_j", m},
          {"fitted_alpha", number(r.fitted_alpha)},
          {"moment", number(r.moment)},
          {"l1_norm", number(r.l1_norm)},
          {"constant", number(r.constant)}};
}

}  // namespace hardy
