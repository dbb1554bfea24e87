// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hardy/heatop.hpp"
#include "hardy/verify.hpp"
#include "oracles.hpp"

using namespace hardy;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("criterion {:>2}: {}  {}\n", id, ok ? "PASS" : "FAIL", detail);
  std::fflush(stdout);
}

std::string gates_of(const ExperimentResult& r) {
  std::string out;
  for (const auto& g : r.gates) {
    if (g.relation == "==" && g.source == "structural") {
      out += fmt::format("[{}{}] ", g.pass ? "" : "FAIL ", g.name);
    } else {
      out += fmt::format("[{}{} = {:.4g} {} {:.4g}] ", g.pass ? "" : "FAIL ", g.name, g.measured, g.relation, g.threshold);
    }
  }
  return out;
}

GridFunction sample_mixture(const std::vector<oracle::MixtureSlab>& slabs, double h, double tau) {
  const SpaceTimeGrid g(1, 8.0, h, 0.0, 4.0, tau);
  return GridFunction::sample(g, [&](const SpacePoint& p) {
    return oracle::mixture_value(slabs[static_cast<std::size_t>(p.t / tau)], p.x[0]);
  });
}

double discrepancy(const GridFunction& tf, const std::vector<oracle::MixtureSlab>& slabs) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < tf.size(); ++i) {
    const auto p = tf.grid().cell_center(i);
    const double ref = oracle::duhamel(slabs, p.t, p.x[0]);
    num += (tf[i] - ref) * (tf[i] - ref);
    den += ref * ref;
  }
  return std::sqrt(num / den);
}

// ||T_h - T_{h/3}|| / ||T_{h/3}|| on the coarse centres; the middle third of
// each coarse cell shares its centre
double quadrature_error(const GridFunction& coarse, const GridFunction& fine) {
  const int nc = coarse.grid().space().cells_per_axis();
  double num = 0, den = 0;
  for (int k = 0; k < coarse.grid().slabs(); ++k) {
    auto c = coarse.slab(k);
    auto f = fine.slab(k);
    for (int i = 0; i < nc; ++i) {
      const double v = f[3 * i + 1];
      num += (c[i] - v) * (c[i] - v);
      den += v * v;
    }
  }
  return std::sqrt(num / den);
}

void criterion_1() {
  const double tau = 0.25, h = 1.0 / 32;
  KernelSpec spec;
  spec.model = SampleModel::point_samples;
  double worst_d = 0, worst_ratio = INFINITY, worst_to_quad = 0, cell_ratio = INFINITY;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto slabs = oracle::random_mixture(seed, 4.0, tau);
    const auto t_h = apply_T(sample_mixture(slabs, h, tau), spec);
    const auto t_half = apply_T(sample_mixture(slabs, h / 2, tau), spec);
    const auto t_third = apply_T(sample_mixture(slabs, h / 3, tau), spec);
    const double d_h = discrepancy(t_h, slabs), d_half = discrepancy(t_half, slabs);
    const double quad = quadrature_error(t_h, t_third);
    worst_d = std::max(worst_d, d_h);
    worst_ratio = std::min(worst_ratio, d_h / d_half);
    worst_to_quad = std::max(worst_to_quad, d_h / quad);
    if (seed <= 3) {
      // the cell-constant model, reported for comparison
      const double c_h = discrepancy(apply_T(sample_mixture(slabs, h, tau), {}), slabs);
      const double c_half = discrepancy(apply_T(sample_mixture(slabs, h / 2, tau), {}), slabs);
      cell_ratio = std::min(cell_ratio, c_h / c_half);
    }
  }
  const bool ok = worst_d <= 1e-3 && worst_ratio >= 4.0 && worst_to_quad <= 10.0;
  report(1, ok,
         fmt::format("20 inputs, h = 1/32: max rel L2 discrepancy {:.3e} (<= 1e-3); min halving ratio {:.2f} (>= 4); "
                     "max discrepancy / quadrature-error estimate {:.2f} (<= 10); cell-constant halving ratio {:.4f}",
                     worst_d, worst_ratio, worst_to_quad, cell_ratio));
}

void experiment(int id, ExperimentResult (*run)(const Settings&)) {
  const auto r = run(Settings{});
  report(id, r.pass(), r.id + ": " + gates_of(r));
}

void criterion_10() {
  Settings s;
  s.set("seed", "7", "acceptance");
  const std::string a = to_json(run_certify_T(s)).dump(2);
  const std::string b = to_json(run_certify_T(s)).dump(2);
  const std::string c = to_json(run_counterexample_T(Settings{})).dump(2);
  const std::string d = to_json(run_counterexample_T(Settings{})).dump(2);
  report(10, a == b && c == d,
         fmt::format("certify-T seed 7 twice: {}; counterexample-T twice: {}", a == b ? "identical" : "DIFFERENT",
                     c == d ? "identical" : "DIFFERENT"));
}

}  // namespace

int main() {
  criterion_1();
  experiment(2, run_certify_T);
  experiment(3, run_mean_value);
  experiment(4, run_certify_Tstar);
  experiment(5, run_counterexample_T);
  experiment(6, run_counterexample_Tstar);
  experiment(7, run_decompose_roundtrip);
  experiment(8, run_l2_stability);
  experiment(9, run_boundary_dichotomy);
  criterion_10();
  fmt::print("{} of 10 criteria pass\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
