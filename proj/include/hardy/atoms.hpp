#pragma once

// Atoms and molecules on N = R x R^n and on the half-space X.
//
//   classical_inf  (1,inf)-atom of N: supp in Q, |a| <= nu(Q)^{-1}, mean zero
//   classical_2    (1,2)-atom of N:   supp in Q, ||a||_2 <= nu(Q)^{-1/2}, mean zero
//   type_a         atom of X with 4Q in X, L2 size, mean zero
//   type_b         atom of X with 2Q in X, 4Q not in X, L2 size, no moment condition
//   hardy_x        atom of X as a space of homogeneous type: ball centred in X,
//                  supp in Q cap X, ||a||_2 <= nu(Q cap X)^{-1/2}, mean zero
//
// A molecule around Q with exponent alpha satisfies
//   M_j = nu(2^{j+1}Q cap X)^{1/2} ||f||_{L2(B_j(Q))} <= C 2^{-j alpha}
// on the annuli B_j of space.hpp and has vanishing integral.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hardy/grid.hpp"
#include "json.hpp"

namespace hardy {

enum class AtomKind { classical_inf, classical_2, type_a, type_b, hardy_x };

std::string to_string(AtomKind kind);
AtomKind atom_kind_from_string(const std::string& name);

inline constexpr double kDefaultAtomTol = 0.05;
inline constexpr double kDefaultAlpha = 0.5;
inline constexpr int kDefaultAnnuli = 8;

struct AtomCertificate {
  AtomKind kind = AtomKind::classical_2;
  ParabolicBall ball{SpacePoint{}, 1.0};
  double tol = kDefaultAtomTol;
  bool geometry_ok = false;  // ball position matches the kind
  bool support_ok = false;
  double size_slack = 0.0;   // ||a||_inf nu or ||a||_2 nu^{1/2}
  double moment = 0.0;       // int a
  double l2_norm = 0.0;
  bool moment_required = true;
  double moment_ratio = 0.0;  // |moment| / (nu^{1/2} ||a||_2)
  bool pass = false;
};

/// Volume used in the size condition of kind: nu(Q), or nu(Q cap X) for hardy_x.
double normalizing_volume(const ParabolicBall& q, AtomKind kind);

/// Whether the position of q suits kind (type_a: 4Q in X; type_b: 2Q in X,
/// 4Q not in X; hardy_x: centre in X; classical kinds: always).
bool geometry_matches(const ParabolicBall& q, AtomKind kind);

/// Throws std::invalid_argument when the grid does not cover Q (Q cap X for
/// grids over X).
AtomCertificate validate_atom(const GridFunction& f, const ParabolicBall& q, AtomKind kind,
                              double tol = kDefaultAtomTol);

/// Grid aligned with Q: step r/cells_per_radius, slab width r^2/cells_per_radius,
/// spatial box [-L, L] with L the smallest multiple of the step reaching
/// |x0| + margin r, and times (0, t0 + r^2] (over X) or a symmetric window (over N).
/// Requires x0 and t0 - r^2 to be multiples of the step and slab width.
SpaceTimeGrid aligned_atom_grid(const ParabolicBall& q, AtomKind kind, int cells_per_radius = 8,
                                double margin = 1.0);

/// Deterministic random atom of the requested kind on grid (which must cover
/// Q). The profile is a random polynomial in the scaled coordinates of Q;
/// mean-zero kinds subtract the cell mean; the size condition holds with
/// equality on the grid.
GridFunction make_atom(const ParabolicBall& q, AtomKind kind, std::uint64_t seed, const SpaceTimeGrid& grid);
GridFunction make_atom(const ParabolicBall& q, AtomKind kind, std::uint64_t seed);

struct MoleculeReport {
  ParabolicBall ball{SpacePoint{}, 1.0};
  double alpha = kDefaultAlpha;
  int annuli = kDefaultAnnuli;
  std::vector<double> annulus_l2;      // ||f||_{L2(B_j)}
  std::vector<double> weighted_norms;  // M_j
  double fitted_alpha = 0.0;           // least-squares slope of -log2 M_j over M_j > 0
  double moment = 0.0;                 // int over 2^{J+1}Q cap X
  double l1_norm = 0.0;                // int |f| over the same region
  double constant = 0.0;               // max_j 2^{j alpha} M_j

  /// M_j <= c 2^{-j alpha} for all j and |moment| <= moment_tol.
  bool certifies(double c, double moment_tol) const;
};

/// Molecule report from grid quadrature. The grid must cover 2^{J+1}Q cap X.
MoleculeReport molecule_report(const GridFunction& f, const ParabolicBall& q, double alpha = kDefaultAlpha,
                               int annuli = kDefaultAnnuli, SpatialDomain domain = SpatialDomain::whole);

using SpaceTimeField = std::function<double(const SpacePoint&)>;

// Annulus j is sampled on its own grid, aligned with the boundaries of
// 2^{j}Q and 2^{j+1}Q: spatial step 2^j r / cells_x, slab 4^j r^2 / cells_t.
// The first annulus uses its own (usually finer) counts. Cells cut by t = 0
// (or x = 0 on the half-line) are clipped and sampled at the clipped midpoint.
struct AnnulusSampling {
  int first_cells_x = 16;
  int first_cells_t = 32;
  int cells_x = 16;
  int cells_t = 32;
};

/// Molecule report for a field that can be evaluated anywhere in X.
MoleculeReport molecule_report(const SpaceTimeField& f, const ParabolicBall& q, double alpha = kDefaultAlpha,
                               int annuli = kDefaultAnnuli, SpatialDomain domain = SpatialDomain::whole,
                               const AnnulusSampling& sampling = {});

/// Least-squares slope of -log2(values[j-1]) against j over the positive entries.
double fit_decay_exponent(const std::vector<double>& values);

nlohmann::json to_json(const SpacePoint& p);
nlohmann::json to_json(const ParabolicBall& q);
nlohmann::json to_json(const AtomCertificate& c);
nlohmann::json to_json(const MoleculeReport& r);

}  // namespace hardy
