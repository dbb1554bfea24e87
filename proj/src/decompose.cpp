#include "hardy/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <fmt/format.h>

namespace hardy {

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double spatial_reach(const ParabolicBall& q) {
  double reach = 0.0;
  for (int k = 0; k < q.dim(); ++k) reach = std::max(reach, std::abs(q.center().x[k]));
  return reach + q.radius();
}

// Smallest grid containing g, with the same cells, whose box covers q.
SpaceTimeGrid grow_to_cover(const SpaceTimeGrid& g, const ParabolicBall& q) {
  const double h = g.space().step();
  const double tau = g.tau();
  double half_width = g.space().half_width();
  const double need_x = spatial_reach(q);
  if (need_x > half_width) half_width += std::ceil((need_x - half_width) / h - 1e-9) * h;
  double t_lo = g.t_lo();
  double t_hi = g.t_hi();
  if (q.t_hi() > t_hi) {
    const double extra = std::ceil((q.t_hi() - t_hi) / tau - 1e-9) * tau;
    t_hi += extra;
    if (g.is_symmetric()) t_lo -= extra;
  }
  if (!g.is_half_space() && q.t_lo() < t_lo) {
    const double extra = std::ceil((t_lo - q.t_lo()) / tau - 1e-9) * tau;
    t_lo -= extra;
    if (g.is_symmetric()) t_hi += extra;
  }
  return SpaceTimeGrid(g.dim(), half_width, h, t_lo, t_hi, tau);
}

SpaceTimeGrid grow_to_cover(SpaceTimeGrid g, const std::vector<ParabolicBall>& balls) {
  for (const auto& q : balls) g = grow_to_cover(g, q);
  return g;
}

GridFunction on_grid(const GridFunction& f, const SpaceTimeGrid& grid) {
  return f.grid() == grid ? f : embed(f, grid);
}

void finish(Decomposition& d, const GridFunction& target) {
  d.coefficient_sum = 0.0;
  for (const auto& term : d.terms) d.coefficient_sum += std::abs(term.coefficient);
  const SpaceTimeGrid& g = d.terms.empty() ? target.grid() : d.terms.front().atom.grid();
  const GridFunction input = on_grid(target, g);
  d.residual = lp_norm(input - d.reconstruct(g), 1);
}

void require_atom(const GridFunction& f, const ParabolicBall& q, AtomKind kind, double tol, const char* who) {
  const auto cert = validate_atom(f, q, kind, tol);
  if (!cert.pass) {
    throw std::invalid_argument(fmt::format(
        "{}: input is not a {} atom (geometry {}, support {}, size {:.6g}, moment ratio {:.3g})", who,
        to_string(kind), cert.geometry_ok, cert.support_ok, cert.size_slack, cert.moment_ratio));
  }
}

GridFunction to_half_space(const GridFunction& a) {
  if (a.grid().is_half_space()) return a;
  if (!a.grid().is_symmetric()) throw std::invalid_argument("expected a grid over X or symmetric about t = 0");
  return restrict_to_half_space(a);
}

}  // namespace

GridFunction Decomposition::reconstruct(const SpaceTimeGrid& grid) const {
  GridFunction out(grid);
  for (const auto& term : terms) {
    GridFunction a = on_grid(term.atom, grid);
    a *= term.coefficient;
    out += a;
  }
  return out;
}

// ---- Whitney cover -------------------------------------------------------

bool whitney_ratio_admissible(double layer_ratio, double kappa) {
  if (!(layer_ratio > 1.0) || !(kappa > 1.0)) return false;
  const double ratio = (1.0 + layer_ratio) / (kappa * (layer_ratio - 1.0));
  return ratio >= 4.0 && ratio < 16.0;
}

int WhitneyCover::owner(const SpacePoint& p) const {
  // layers run downward in time
  auto it = std::find_if(layers.begin(), layers.end(),
                         [&](const WhitneyLayer& l) { return p.t >= l.t_lo && p.t < l.t_hi; });
  if (it == layers.end()) return -1;
  const WhitneyLayer& layer = *it;
  int slot = 0;
  for (int k = 0; k < p.dim; ++k) {
    const int box = static_cast<int>(std::floor((p.x[k] - anchor.x[k]) / layer.side)) - layer.first_box;
    if (box < 0 || box >= layer.boxes_per_axis) return -1;
    slot = slot * layer.boxes_per_axis + box;
  }
  return layer.slots[slot];
}

WhitneyCover whitney_cover(const ParabolicBall& q, const WhitneyParams& params) {
  if (!whitney_ratio_admissible(params.layer_ratio, params.kappa)) {
    throw std::invalid_argument(fmt::format("whitney_cover: layer ratio {} with kappa {} gives balls of the wrong type",
                                            params.layer_ratio, params.kappa));
  }
  if (!(params.t_floor > 0.0)) throw std::invalid_argument("whitney_cover: t_floor must be positive");
  if (!(q.t_hi() > 0.0)) throw std::invalid_argument("whitney_cover: ball misses X");
  if (contains_scaled(q).double_in_x) throw std::invalid_argument("whitney_cover: 2Q already lies in X");
  const int dim = q.dim();
  const double r = q.radius();
  const double bottom = std::max(0.0, q.t_lo());
  WhitneyCover cover;
  cover.params = params;
  cover.anchor = q.center();
  double upper = q.t_hi();
  while (upper > bottom && upper > params.t_floor) {
    const double lower = upper / params.layer_ratio;
    const double rho = std::sqrt(params.kappa * lower * (params.layer_ratio - 1.0) / 2.0);
    WhitneyLayer layer;
    layer.t_lo = lower;
    layer.t_hi = upper;
    layer.side = rho;
    layer.first_box = static_cast<int>(std::floor(-r / rho));
    const int last_box = static_cast<int>(std::ceil(r / rho)) - 1;
    layer.boxes_per_axis = last_box - layer.first_box + 1;
    const int per = layer.boxes_per_axis;
    layer.slots.assign(dim == 1 ? per : per * per, -1);
    const double tc = 0.5 * (lower + upper);
    for (int slot = 0; slot < static_cast<int>(layer.slots.size()); ++slot) {
      std::array<int, kMaxDim> box{};
      if (dim == 1) {
        box[0] = slot;
      } else {
        box[0] = slot / per;
        box[1] = slot % per;
      }
      WhitneyPiece piece{ParabolicBall(q.center(), 1.0), lower, upper, {}, rho};
      SpacePoint centre = q.center();
      centre.t = tc;
      // distance from the centre of Q to the box, to drop boxes missing the spatial ball
      double gap2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double lo = q.center().x[k] + (layer.first_box + box[k]) * rho;
        piece.box_lo[k] = lo;
        centre.x[k] = lo + 0.5 * rho;
        const double gap = std::max({0.0, lo - q.center().x[k], q.center().x[k] - (lo + rho)});
        gap2 += gap * gap;
      }
      if (gap2 >= r * r) continue;
      piece.ball = ParabolicBall(centre, rho);
      layer.slots[slot] = static_cast<int>(cover.pieces.size());
      cover.pieces.push_back(piece);
    }
    cover.layers.push_back(std::move(layer));
    upper = lower;
  }
  return cover;
}

CoverStats cover_stats(const WhitneyCover& cover, const ParabolicBall& q, const SpaceTimeGrid& grid) {
  const auto& sg = grid.space();
  const int dim = grid.dim();
  const int nc = sg.cells_per_axis();
  const double h = sg.step();
  std::vector<int> count(grid.size(), 0);
  auto index_range = [](double lo, double hi, double origin, double step, int n) {
    int a = std::max(0, static_cast<int>(std::floor((lo - origin) / step)));
    int b = std::min(n - 1, static_cast<int>(std::ceil((hi - origin) / step)));
    return std::pair<int, int>{a, b};
  };
  double total = 0.0;
  for (const auto& piece : cover.pieces) {
    const auto& b = piece.ball;
    total += ball_volume(b);
    const auto [k0, k1] = index_range(b.t_lo(), b.t_hi(), grid.t_lo(), grid.tau(), grid.slabs());
    const auto [i0, i1] = index_range(b.center().x[0] - b.radius(), b.center().x[0] + b.radius(), -sg.half_width(), h, nc);
    auto [j0, j1] = dim == 2 ? index_range(b.center().x[1] - b.radius(), b.center().x[1] + b.radius(), -sg.half_width(), h, nc)
                             : std::pair<int, int>{0, 0};
    for (int k = k0; k <= k1; ++k) {
      for (int i = i0; i <= i1; ++i) {
        for (int j = j0; j <= j1; ++j) {
          const std::size_t idx = static_cast<std::size_t>(k) * grid.slab_size() +
                                  (dim == 1 ? static_cast<std::size_t>(i) : static_cast<std::size_t>(i) * nc + j);
          if (b.contains(grid.cell_center(idx))) ++count[idx];
        }
      }
    }
  }
  CoverStats st;
  st.volume_ratio = total / truncated_volume(q);
  st.covers = true;
  st.partition = true;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const SpacePoint p = grid.cell_center(idx);
    if (!(p.t > 0.0) || !q.contains(p)) continue;
    st.max_overlap = std::max(st.max_overlap, count[idx]);
    if (p.t < cover.params.t_floor) continue;
    if (count[idx] == 0) st.covers = false;
    const int own = cover.owner(p);
    if (own < 0 || !cover.pieces[own].ball.contains(p)) st.partition = false;
  }
  return st;
}

// ---- restriction of a classical atom to X ---------------------------------

Decomposition restrict_decompose(const GridFunction& a, const ParabolicBall& q, double tol,
                                 const WhitneyParams& params) {
  require_atom(a, q, AtomKind::classical_2, tol, "restrict_decompose");
  Decomposition d;
  d.method = "restrict";
  const GridFunction half = to_half_space(a);
  if (!(q.t_hi() > 0.0)) {
    finish(d, half);
    return d;
  }
  const auto place = contains_scaled(q);
  if (place.double_in_x) {
    const AtomKind kind = place.quadruple_in_x ? AtomKind::type_a : AtomKind::type_b;
    d.terms.push_back({1.0, half, q, kind});
    d.constants["pieces"] = 1.0;
    d.constants["coefficient_constant"] = 1.0;
    finish(d, half);
    return d;
  }

  WhitneyParams wp = params;
  wp.t_floor = std::min(wp.t_floor, half.grid().slab_center(0));
  const WhitneyCover cover = whitney_cover(q, wp);
  std::vector<char> used(cover.pieces.size(), 0);
  for (std::size_t i = 0; i < half.size(); ++i) {
    if (half[i] == 0.0) continue;
    const int own = cover.owner(half.grid().cell_center(i));
    if (own < 0) throw std::runtime_error("restrict_decompose: a support cell has no Whitney piece");
    used[own] = 1;
  }
  std::vector<ParabolicBall> balls;
  for (std::size_t j = 0; j < cover.pieces.size(); ++j) {
    if (used[j]) balls.push_back(cover.pieces[j].ball);
  }
  const SpaceTimeGrid out_grid = grow_to_cover(half.grid(), balls);
  const GridFunction source = on_grid(half, out_grid);
  std::vector<int> order(cover.pieces.size(), -1);
  for (std::size_t j = 0; j < cover.pieces.size(); ++j) {
    if (!used[j]) continue;
    order[j] = static_cast<int>(d.terms.size());
    d.terms.push_back({0.0, GridFunction(out_grid), cover.pieces[j].ball, AtomKind::type_b});
  }
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == 0.0) continue;
    d.terms[order[cover.owner(out_grid.cell_center(i))]].atom[i] = source[i];
  }
  for (auto& term : d.terms) {
    const double lambda = lp_norm(term.atom, 2) * std::sqrt(ball_volume(term.ball));
    term.coefficient = lambda;
    term.atom *= 1.0 / lambda;
  }
  finish(d, half);
  const CoverStats st = cover_stats(cover, q, half.grid());
  d.constants["pieces"] = static_cast<double>(d.terms.size());
  d.constants["max_overlap"] = st.max_overlap;
  d.constants["volume_ratio"] = st.volume_ratio;
  d.constants["coefficient_constant"] =
      d.coefficient_sum / (lp_norm(a, 2) * std::sqrt(truncated_volume(q)));
  return d;
}

// ---- odd reflection of a type (b) atom ----------------------------------

ReflectedAtom reflect_assemble(const GridFunction& b, const ParabolicBall& q, double tol) {
  require_atom(b, q, AtomKind::type_b, tol, "reflect_assemble");
  if (!b.grid().is_half_space()) throw std::invalid_argument("reflect_assemble: expected a grid over X");
  SpacePoint centre = q.center();
  centre.t = 0.0;
  const ParabolicBall big(centre, 5.0 * q.radius());
  const GridFunction padded = on_grid(b, grow_to_cover(b.grid(), big));
  GridFunction odd = odd_extend(padded);
  const double c = lp_norm(odd, 2) * std::sqrt(ball_volume(big));
  if (!(c > 0.0)) throw std::invalid_argument("reflect_assemble: zero input");
  odd *= 1.0 / c;
  return {std::move(odd), big, c};
}

// ---- H1_z from decompositions of the even extension --------------------------

Decomposition hz_decompose(const GridFunction& f, const Decomposition& given, double tol) {
  if (!f.grid().is_half_space()) throw std::invalid_argument("hz_decompose: f must live on a grid over X");
  const GridFunction fe = even_extend(f);
  SpaceTimeGrid sym = fe.grid();
  for (const auto& term : given.terms) {
    if (!term.atom.grid().is_symmetric()) throw std::invalid_argument("hz_decompose: atoms must live on symmetric grids");
    if (term.atom.grid().t_hi() > sym.t_hi() || term.atom.grid().space().half_width() > sym.space().half_width()) {
      sym = SpaceTimeGrid(sym.dim(), std::max(sym.space().half_width(), term.atom.grid().space().half_width()),
                          sym.space().step(), -std::max(sym.t_hi(), term.atom.grid().t_hi()),
                          std::max(sym.t_hi(), term.atom.grid().t_hi()), sym.tau());
    }
  }
  const GridFunction fe_big = on_grid(fe, sym);
  const double mismatch = lp_norm(fe_big - given.reconstruct(sym), 1);
  if (mismatch > tol * lp_norm(fe_big, 1)) {
    throw std::invalid_argument(
        fmt::format("hz_decompose: given decomposition misses the even extension by {:.3g} in L1", mismatch));
  }

  struct Pending {
    double coefficient;
    GridFunction atom;  // on the half of sym
    ParabolicBall ball;
  };
  std::vector<Pending> pending;
  int upper = 0, lower = 0, straddling = 0;
  for (const auto& term : given.terms) {
    const GridFunction A = on_grid(term.atom, sym);
    const ParabolicBall& q = term.ball;
    if (q.t_lo() >= 0.0) {
      ++upper;
      pending.push_back({term.coefficient / 2.0, restrict_to_half_space(A), q});
    } else if (q.t_hi() <= 0.0) {
      ++lower;
      SpacePoint c = q.center();
      c.t = -c.t;
      pending.push_back({term.coefficient / 2.0, restrict_to_half_space(time_reflect(A)), ParabolicBall(c, q.radius())});
    } else {
      ++straddling;
      GridFunction sym_part = A + time_reflect(A);
      sym_part *= 0.5;
      GridFunction piece = restrict_to_half_space(sym_part);
      SpacePoint c = q.center();
      c.t = q.radius() * q.radius();
      const ParabolicBall ball(c, q.radius());
      const double norm = lp_norm(piece, 2) * std::sqrt(ball_volume(ball));
      if (!(norm > 0.0)) continue;
      piece *= 1.0 / norm;
      pending.push_back({term.coefficient * norm, std::move(piece), ball});
    }
  }
  std::vector<ParabolicBall> balls;
  for (const auto& p : pending) balls.push_back(p.ball);
  const SpaceTimeGrid out_grid = grow_to_cover(f.grid(), balls);
  Decomposition d;
  d.method = "hz";
  for (auto& p : pending) {
    d.terms.push_back({p.coefficient, on_grid(p.atom, out_grid), p.ball, AtomKind::classical_2});
  }
  finish(d, f);
  d.constants["input_coefficient_sum"] = given.coefficient_sum;
  d.constants["upper_terms"] = upper;
  d.constants["lower_terms"] = lower;
  d.constants["straddling_terms"] = straddling;
  d.constants["given_mismatch"] = mismatch;
  return d;
}

RecentredAtom recentre_atom(const GridFunction& a, const ParabolicBall& q) {
  if (!(q.center().t > 0.0)) throw std::invalid_argument("recentre_atom: ball centre must lie in X");
  if (q.t_lo() >= 0.0) return {a, q, 1.0};
  SpacePoint c = q.center();
  c.t = q.radius() * q.radius();
  const ParabolicBall ball(c, q.radius());
  const double factor = std::sqrt(ball_volume(ball) / truncated_volume(q));
  GridFunction out = on_grid(a, grow_to_cover(a.grid(), ball));
  out *= 1.0 / factor;
  return {std::move(out), ball, factor};
}

// ---- molecules ----------------------------------------------------------

Decomposition molecule_decompose(const GridFunction& m, const ParabolicBall& q, double alpha, int annuli,
                                 double moment_tol) {
  if (!m.grid().is_half_space()) throw std::invalid_argument("molecule_decompose: expected a grid over X");
  const MoleculeReport rep = molecule_report(m, q, alpha, annuli);
  const double total = integrate(m);
  const double mass = lp_norm(m, 1);
  if (std::abs(total) > moment_tol * mass) {
    throw std::invalid_argument(
        fmt::format("molecule_decompose: integral {:.3g} is not small against the L1 norm {:.3g}", total, mass));
  }
  const auto& g = m.grid();
  const double cell = g.cell_measure();
  std::vector<int> which(m.size(), 0);
  std::vector<double> eta(annuli + 1, 0.0), vol(annuli + 1, 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const int j = annulus_index(q, g.cell_center(i), annuli);
    which[i] = j;
    if (j == 0) continue;
    eta[j] += m[i] * cell;
    vol[j] += cell;
  }
  Decomposition d;
  d.method = "molecule";
  const double cm = rep.constant;
  // mean-free parts of m on each annulus
  for (int j = 1; j <= annuli && cm > 0.0; ++j) {
    if (vol[j] == 0.0) continue;
    const double mean = eta[j] / vol[j];
    const double lambda = cm * std::pow(2.0, -j * alpha);
    GridFunction a(g);
    bool any = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (which[i] != j) continue;
      a[i] = (m[i] - mean) / lambda;
      any = any || a[i] != 0.0;
    }
    if (any) d.terms.push_back({lambda, std::move(a), dilate(q, std::ldexp(1.0, j + 1)), AtomKind::hardy_x});
  }
  // averages, rewritten as telescoping differences of normalized indicators
  double mu = eta[1];
  double mu_constant = 0.0;
  double b_constant = 0.0;
  for (int j = 2; j <= annuli; ++j) {
    const double mu_j = mu;
    mu += eta[j];
    mu_constant = std::max(mu_constant, std::abs(mu_j) * std::pow(2.0, j * alpha));
    if (vol[j] == 0.0 || vol[j - 1] == 0.0) continue;
    GridFunction b(g);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (which[i] == j - 1) b[i] = 1.0 / vol[j - 1];
      if (which[i] == j) b[i] = -1.0 / vol[j];
    }
    const ParabolicBall ball = dilate(q, std::ldexp(1.0, j + 1));
    const double c = lp_norm(b, 2) * std::sqrt(truncated_volume(ball));
    b_constant = std::max(b_constant, c);
    b *= 1.0 / c;
    if (mu_j != 0.0) d.terms.push_back({mu_j * c, std::move(b), ball, AtomKind::hardy_x});
  }
  finish(d, m);
  d.constants["molecule_constant"] = cm;
  d.constants["fitted_alpha"] = rep.fitted_alpha;
  d.constants["mu_constant"] = mu_constant;
  d.constants["b_atom_constant"] = b_constant;
  d.constants["final_average"] = mu;
  d.constants["tail_bound"] = cm * std::pow(2.0, -annuli * alpha);
  return d;
}

// ---- norm bounds ----------------------------------------------------------

std::string to_string(NormStrategy s) {
  switch (s) {
    case NormStrategy::atom: return "atom";
    case NormStrategy::odd_extension: return "odd_extension";
    case NormStrategy::even_extension: return "even_extension";
    case NormStrategy::molecule: return "molecule";
  }
  return "unknown";
}

namespace {

std::string space_of(AtomKind kind, const ParabolicBall& q) {
  switch (kind) {
    case AtomKind::type_a:
    case AtomKind::type_b: return "H1_r";
    case AtomKind::hardy_x: return "H1(X)";
    default: return q.t_lo() >= 0.0 ? "H1_z" : "H1(N)";
  }
}

NormBound failed(NormStrategy s, std::string reason) {
  NormBound b;
  b.method = to_string(s);
  b.reason = std::move(reason);
  return b;
}

}  // namespace

NormBound finite_norm_bound(const GridFunction& f, const ParabolicBall& q, NormStrategy strategy, AtomKind kind,
                            double tol) {
  if (!f.grid().is_half_space()) throw std::invalid_argument("finite_norm_bound: f must live on a grid over X");
  NormBound out;
  out.method = to_string(strategy);
  switch (strategy) {
    case NormStrategy::atom: {
      const auto cert = validate_atom(f, q, kind, tol);
      if (!cert.geometry_ok) return failed(strategy, "ball position does not suit " + to_string(kind));
      if (!cert.support_ok) return failed(strategy, "support leaves the ball");
      if (cert.moment_required && cert.moment_ratio > tol) {
        return failed(strategy, fmt::format("nonzero moment: integral {:.6g}", cert.moment));
      }
      out.space = space_of(kind, q);
      out.bound = cert.size_slack;
      out.decomposition.method = "atom";
      if (cert.size_slack > 0.0) {
        GridFunction a = f;
        a *= 1.0 / cert.size_slack;
        out.decomposition.terms.push_back({cert.size_slack, std::move(a), q, kind});
      }
      finish(out.decomposition, f);
      out.ok = true;
      return out;
    }
    case NormStrategy::odd_extension:
    case NormStrategy::even_extension: {
      const bool odd = strategy == NormStrategy::odd_extension;
      SpaceTimeGrid sym = grow_to_cover(reflected_grid(f.grid()), q);
      const GridFunction ext = on_grid(odd ? odd_extend(f) : even_extend(f), sym);
      const double c = lp_norm(ext, 2) * std::sqrt(ball_volume(q));
      if (!(c > 0.0)) {
        out.ok = true;
        out.space = odd ? "H1_r" : "H1_z";
        return out;
      }
      GridFunction a = ext;
      a *= 1.0 / c;
      const auto cert = validate_atom(a, q, AtomKind::classical_2, tol);
      if (!cert.support_ok) return failed(strategy, "extension is not supported in the ball");
      if (cert.moment_ratio > tol) {
        return failed(strategy, fmt::format("nonzero moment: the {} extension has integral {:.6g}",
                                            odd ? "odd" : "even", integrate(ext)));
      }
      if (odd) {
        Decomposition d = restrict_decompose(a, q, tol);
        for (auto& term : d.terms) term.coefficient *= c;
        finish(d, f);
        d.constants["extension_constant"] = c;
        out.space = "H1_r";
        out.bound = d.coefficient_sum;
        out.decomposition = std::move(d);
      } else {
        Decomposition given;
        given.method = "even_extension_atom";
        given.terms.push_back({c, a, q, AtomKind::classical_2});
        given.coefficient_sum = c;
        Decomposition d = hz_decompose(f, given, 1e-9);
        d.constants["extension_constant"] = c;
        out.space = "H1_z";
        out.bound = d.coefficient_sum;
        out.decomposition = std::move(d);
      }
      out.ok = true;
      return out;
    }
    case NormStrategy::molecule: {
      int annuli = kDefaultAnnuli;
      while (annuli >= 1 && !f.grid().covers(dilate(q, std::ldexp(1.0, annuli + 1)))) --annuli;
      if (annuli < 1) return failed(strategy, "grid does not cover 4Q cap X");
      try {
        Decomposition d = molecule_decompose(f, q, kDefaultAlpha, annuli, tol);
        if (d.residual > tol * lp_norm(f, 1)) {
          return failed(strategy, fmt::format("mass outside 2^{}Q is {:.3g} in L1", annuli + 1, d.residual));
        }
        out.space = "H1(X)";
        out.bound = d.coefficient_sum;
        out.decomposition = std::move(d);
        out.ok = true;
      } catch (const std::invalid_argument& e) {
        return failed(strategy, e.what());
      }
      return out;
    }
  }
  return failed(strategy, "unknown strategy");
}

nlohmann::json to_json(const Decomposition& d, bool include_terms) {
  nlohmann::json j;
  j["method"] = d.method;
  j["coefficient_sum"] = number(d.coefficient_sum);
  j["residual"] = number(d.residual);
  j["term_count"] = d.terms.size();
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [k, v] : d.constants) c[k] = number(v);
  j["constants"] = c;
  if (include_terms) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : d.terms) {
      terms.push_back({{"coefficient", number(t.coefficient)}, {"kind", to_string(t.kind)}, {"ball", to_json(t.ball)}});
    }
    j["terms"] = terms;
  }
  return j;
}

nlohmann::json to_json(const NormBound& b) {
  return {{"ok", b.ok},
          {"bound", number(b.bound)},
          {"space", b.space},
          {"method", b.method},
          {"reason", b.reason},
          {"decomposition", to_json(b.decomposition, false)}};
}

void spill_atoms(const Decomposition& d, const std::string& directory, const std::string& stem) {
  std::filesystem::create_directories(directory);
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    const auto path = std::filesystem::path(directory) / fmt::format("{}_{}.bin", stem, i);
    write_binary(d.terms[i].atom, path.string());
  }
}

}  // namespace hardy
