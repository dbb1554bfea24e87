#pragma once

// Numerical certification experiments.
//
// Each experiment reads its parameters from a Settings object (flat key=value
// pairs with provenance), runs deterministically from (seed, settings) and
// returns an ExperimentResult: measured constants, CSV tables and a list of
// gates, each carrying its threshold and where that threshold came from.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hardy/atoms.hpp"
#include "hardy/decompose.hpp"
#include "hardy/heatop.hpp"
#include "json.hpp"

namespace hardy {

class Settings {
 public:
  /// source is a short label such as "config" or "flag".
  void set(const std::string& key, const std::string& value, const std::string& source);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Typed reads; each read is recorded, with "default" as the source when the
  // key was never set. Malformed values throw std::invalid_argument.
  double real(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::string source(const std::string& key) const;

  std::vector<std::string> keys() const;
  /// Every key read or set: {"value": ..., "source": ...}.
  nlohmann::json echo() const;

 private:
  struct Entry {
    std::string value;
    std::string source;
  };
  std::map<std::string, Entry> entries_;
  mutable std::map<std::string, Entry> reads_;
};

struct Gate {
  std::string name;
  double measured = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "=="
  double threshold = 0.0;
  std::string source;    // provenance of the threshold
  bool pass = false;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// RFC-4180 CSV with CRLF line endings; numbers in shortest round-trip form.
void write_csv(const Table& table, std::ostream& os);

struct ExperimentResult {
  std::string id;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json measured = nlohmann::json::object();
  std::vector<Gate> gates;
  std::vector<Table> tables;

  bool pass() const;
  /// Adds a gate whose threshold is read from settings (key, fallback).
  void gate(const std::string& name, double value, const std::string& relation, const Settings& settings,
            const std::string& key, double fallback);
  void gate(const std::string& name, bool ok);
};

nlohmann::json to_json(const ExperimentResult& r);

// ---- single-atom certification ------------------------------------------------

struct AtomRun {
  AtomCertificate certificate;
  MoleculeReport report;
  double relative_moment = 0.0;  // |int| / (nu(Q)^{1/2} ||a||_2), 0 for a = 0
};

/// T a (forward) or T* a (adjoint) sampled as a field on the annuli of Q.
/// Throws when a does not validate as `kind` on q.
AtomRun certify_on_atom(const GridFunction& a, const ParabolicBall& q, AtomKind kind,
                        OperatorField::Direction direction, double alpha = kDefaultAlpha,
                        int annuli = kDefaultAnnuli, const KernelSpec& spec = {},
                        const AnnulusSampling& sampling = {});

AtomRun certify_T_on_atom(const GridFunction& a, const ParabolicBall& q, AtomKind kind,
                          double alpha = kDefaultAlpha, int annuli = kDefaultAnnuli);

/// Random atom of the given kind with r = 1 on a ball aligned with the atom
/// grid; type_a/classical kinds use t0 in [lo, hi], x0 in [-4, 4].
struct PlacedAtom {
  GridFunction atom;
  ParabolicBall ball;
};
PlacedAtom random_placed_atom(AtomKind kind, std::uint64_t seed, int dim, double t0_lo, double t0_hi,
                              int cells_per_radius = 8);

// ---- per-time spatial means -----------------------------------------------------

struct TimeSlice {
  double t = 0.0;
  double mean = 0.0;      // int f(t, x) dx
  double l1 = 0.0;        // int |f(t, x)| dx
  double relative = 0.0;  // |mean| / l1 (0 when l1 = 0)
  // spatial molecule constant of f(t, .) around B(x0, rho), rho = max(r, (t - t_lo)^{1/2})
  double spatial_constant = 0.0;
};

/// `count` times spread geometrically over (t_lo, t_lo + span] where t_lo is
/// the lower end of the support of the field's input.
std::vector<double> slice_times(double t_lo, double span, int count);

/// Midpoint sums with the input step, over x0 +- 16 rho (a square in 2-D).
TimeSlice spatial_slice(const OperatorField& field, const ParabolicBall& q, double t, double alpha = kDefaultAlpha);

// ---- counterexamples ------------------------------------------------------------

struct GrowthFit {
  std::vector<double> T, value;
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares fit of value against ln T.
GrowthFit fit_log_growth(std::vector<double> T, std::vector<double> value);

/// T f for f = indicator of (0,1) x (-1,1) on the line, from the erf closed form.
double indicator_Tf(double t, double x);

/// I(T) = int_{t_start}^{T} int_{|x| <= sqrt(t)/2} |T f| for each T (increasing).
std::vector<double> indicator_growth(const std::vector<double>& T, double t_start);

/// int |d/dt p_t(x)| dx at t = 1 by adaptive quadrature (dimension 1 or 2).
double tstar_constant(int dim);

/// G(T) = int_{t_min}^{T} int |d/du p_u(z)| dz du by nested quadrature.
std::vector<double> tstar_growth(const std::vector<double>& T, double t_min, int dim);

// ---- norm probes ----------------------------------------------------------------

/// ||T f||_p / ||f||_p, 0 when f = 0.
double empirical_ratio(const GridFunction& f, double p, const KernelSpec& spec = {});

/// Random step inputs on the base grid: a few boxes with Gaussian heights.
std::vector<GridFunction> probe_inputs(const SpaceTimeGrid& base, std::uint64_t seed, int count);

// ---- boundary problems ---------------------------------------------------------

/// int over (0, t_max] x Omega of T a, computed with apply_T on the grid of a
/// (which must be an X-grid reaching t_max, symmetric in x for the half-line).
double windowed_moment(const GridFunction& a, const KernelSpec& spec);

/// c (indicator on (x0 - r, x0) minus indicator on (x0, x0 + r)) in time
/// |t - t0| < r^2, normalized as a (1,2)-atom, on the given grid.
GridFunction step_atom(const ParabolicBall& q, const SpaceTimeGrid& grid);

// ---- experiment catalogue ---------------------------------------------------------

struct ParameterSpec {
  std::string key;
  std::string fallback;
  std::string meaning;
};

struct ExperimentInfo {
  std::string id;
  std::string summary;
  std::string claim;      // the statement certified, in formulas
  std::string reference;  // the operation it exercises
  std::vector<ParameterSpec> parameters;
  std::function<ExperimentResult(const Settings&)> run;
};

const std::vector<ExperimentInfo>& experiment_catalogue();
/// Throws std::invalid_argument for unknown ids.
const ExperimentInfo& find_experiment(const std::string& id);

/// Rejects keys that are neither common keys nor parameters of the experiment.
void check_settings(const ExperimentInfo& info, const Settings& settings);

ExperimentResult run_certify_T(const Settings& s);
ExperimentResult run_mean_value(const Settings& s);
ExperimentResult run_certify_Tstar(const Settings& s);
ExperimentResult run_counterexample_T(const Settings& s);
ExperimentResult run_counterexample_Tstar(const Settings& s);
ExperimentResult run_decompose_roundtrip(const Settings& s);
ExperimentResult run_l2_stability(const Settings& s);
ExperimentResult run_lp_probe(const Settings& s);
ExperimentResult run_boundary_dichotomy(const Settings& s);

}  // namespace hardy
