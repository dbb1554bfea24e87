#pragma once

// Constructive decompositions behind the atomic characterizations on X.
//
// restrict_decompose   classical (1,2)-atom A of N  ->  type (a)/(b) atoms of X
// reflect_assemble     type (b) atom of X           ->  classical (1,2)-atom of N
// hz_decompose         atoms of the even extension  ->  (1,2)-atoms supported in X
// recentre_atom        atom of X with ball centred in X  ->  ball inside X
// molecule_decompose   molecule                     ->  atoms of X plus telescoping terms
//
// All decompositions are finite; truncation shows up in `residual`.

#include <map>
#include <string>
#include <vector>

#include "hardy/atoms.hpp"

namespace hardy {

struct DecompositionTerm {
  double coefficient = 0.0;
  GridFunction atom;
  ParabolicBall ball;
  AtomKind kind;
};

struct Decomposition {
  std::string method;
  std::vector<DecompositionTerm> terms;
  double coefficient_sum = 0.0;  // sum |lambda|
  double residual = 0.0;         // L1 norm of input minus sum lambda atom
  std::map<std::string, double> constants;

  /// Sum of lambda * atom on the grid of the first term (or of `grid`).
  GridFunction reconstruct(const SpaceTimeGrid& grid) const;
};

// Whitney layers: time bands [l, q l) going down from the top of Q cap X by
// the ratio q. A band is covered by balls of radius rho with rho^2 =
// kappa l (q - 1) / 2 centred at the band midpoint, over spatial boxes of side
// rho (squares in dimension two) anchored at the centre of Q.
struct WhitneyParams {
  double layer_ratio = 1.5;
  double kappa = 1.2;
  /// Bands stop once their lower end falls below this time (> 0).
  double t_floor = 1e-3;
};

struct WhitneyPiece {
  ParabolicBall ball;
  double t_lo, t_hi;                  // band [t_lo, t_hi)
  std::array<double, kMaxDim> box_lo;  // spatial box [box_lo, box_lo + side)
  double side;
};

struct WhitneyLayer {
  double t_lo, t_hi, side;
  int first_box;            // box index of the first slot along each axis
  int boxes_per_axis;
  std::vector<int> slots;   // piece index per box (row-major), -1 when absent
};

struct WhitneyCover {
  std::vector<WhitneyPiece> pieces;
  std::vector<WhitneyLayer> layers;  // top band first
  WhitneyParams params;
  SpacePoint anchor;

  /// Index of the piece whose band and box hold p, or -1.
  int owner(const SpacePoint& p) const;
};

/// Ratio range for which every ball satisfies 2Q_j in X and 4Q_j not in X.
bool whitney_ratio_admissible(double layer_ratio, double kappa);

/// Requires Q cap X nonempty and 2Q not in X.
WhitneyCover whitney_cover(const ParabolicBall& q, const WhitneyParams& params = {});

struct CoverStats {
  int max_overlap = 0;       // max over cells of the number of balls containing the centre
  double volume_ratio = 0.0;  // sum nu(Q_j) / nu(Q cap X)
  bool covers = false;       // every cell of Q cap X on the grid lies in some ball
  bool partition = false;    // every such cell has exactly one owner piece
};

CoverStats cover_stats(const WhitneyCover& cover, const ParabolicBall& q, const SpaceTimeGrid& grid);

/// A must be a classical (1,2)-atom on a grid symmetric about t = 0 whose ball
/// meets X. Output atoms live on the half-space grid.
Decomposition restrict_decompose(const GridFunction& a, const ParabolicBall& q, double tol = kDefaultAtomTol,
                                 const WhitneyParams& params = {});

struct ReflectedAtom {
  GridFunction atom;      // classical (1,2)-atom of N
  ParabolicBall ball;     // centred at (0, y) with radius 5r
  double constant = 0.0;  // ||b(t) - b(-t)||_2 nu(ball)^{1/2}; atom = that / constant
};

ReflectedAtom reflect_assemble(const GridFunction& b, const ParabolicBall& q, double tol = kDefaultAtomTol);

/// f on X; `given` decomposes the even extension of f on N into classical
/// (1,2)-atoms. Throws when that decomposition misses f_e by more than
/// tol * ||f_e||_1.
Decomposition hz_decompose(const GridFunction& f, const Decomposition& given, double tol = 1e-10);

struct RecentredAtom {
  GridFunction atom;
  ParabolicBall ball;
  double factor = 1.0;  // (nu(new ball) / nu(Q cap X))^{1/2} <= sqrt 2
};

/// Atom a of X normalized against nu(Q cap X), ball centred at t0 > 0. When
/// Q is not inside X the ball is replaced by the one centred at (r^2, y) with
/// radius r, and a is divided by the volume factor.
RecentredAtom recentre_atom(const GridFunction& a, const ParabolicBall& q);

/// The telescoping decomposition of a molecule m around Q on a grid over X.
/// Requires |int m| <= moment_tol * ||m||_1 over the whole grid. The residual
/// is the mass outside 2^{J+1}Q plus the average left on the last annulus.
Decomposition molecule_decompose(const GridFunction& m, const ParabolicBall& q, double alpha = kDefaultAlpha,
                                 int annuli = kDefaultAnnuli, double moment_tol = 1e-8);

enum class NormStrategy { atom, odd_extension, even_extension, molecule };

std::string to_string(NormStrategy s);

struct NormBound {
  bool ok = false;
  double bound = 0.0;  // upper bound on the atomic norm (coefficient sum)
  std::string space;   // "H1_r", "H1_z" or "H1(X)"
  std::string method;
  std::string reason;  // why no bound, when ok is false
  Decomposition decomposition;
};

/// Upper bound on an atomic norm of f (on a grid over X) from a constructed
/// decomposition; never a lower bound.
///   atom            f / c validates as `kind` on q, bound c
///   odd_extension   odd extension is c times a (1,2)-atom on q; Whitney restriction (H1_r)
///   even_extension  even extension is c times a (1,2)-atom on q; hz_decompose (H1_z)
///   molecule        molecule_decompose around q (H1(X))
NormBound finite_norm_bound(const GridFunction& f, const ParabolicBall& q, NormStrategy strategy,
                            AtomKind kind = AtomKind::classical_2, double tol = kDefaultAtomTol);

nlohmann::json to_json(const Decomposition& d, bool include_terms = true);
nlohmann::json to_json(const NormBound& b);

/// Writes each atom of d as `<stem>_<index>.bin` in the binary grid format.
void spill_atoms(const Decomposition& d, const std::string& directory, const std::string& stem);

}  // namespace hardy
