#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "hardy/verify.hpp"
#include "oracles.hpp"

using namespace hardy;

namespace {

Settings with(std::initializer_list<std::pair<const char*, const char*>> kv) {
  Settings s;
  for (const auto& [k, v] : kv) s.set(k, v, "test");
  return s;
}

}  // namespace

TEST(Settings, TypedReadsAndProvenance) {
  auto s = with({{"tol", "1e-4"}, {"samples", "12"}, {"p_values", "2,3"}});
  EXPECT_DOUBLE_EQ(s.real("tol", 1.0), 1e-4);
  EXPECT_EQ(s.integer("samples", 1), 12);
  EXPECT_EQ(s.text("p_values", ""), "2,3");
  EXPECT_DOUBLE_EQ(s.real("alpha", 0.5), 0.5);
  const auto echo = s.echo();
  EXPECT_EQ(echo.at("tol").at("source"), "test");
  EXPECT_EQ(echo.at("alpha").at("source"), "default");
  EXPECT_EQ(echo.at("alpha").at("value"), "0.5");
}

TEST(Settings, MalformedValuesThrow) {
  auto s = with({{"tol", "abc"}, {"samples", "3.5"}, {"n", "1x"}});
  EXPECT_THROW(s.real("tol", 1.0), std::invalid_argument);
  EXPECT_THROW(s.integer("samples", 1), std::invalid_argument);
  EXPECT_THROW(s.integer("n", 1), std::invalid_argument);
  EXPECT_THROW(s.set("", "1", "x"), std::invalid_argument);
}

TEST(Table, CsvUsesCrlfAndRoundTripNumbers) {
  Table t{"growth", {"T", "I_T"}, {{8, 0.1}, {16, 1.0 / 3.0}}};
  std::ostringstream os;
  write_csv(t, os);
  EXPECT_EQ(os.str(), "T,I_T\r\n8,0.1\r\n16,0.3333333333333333\r\n");
}

TEST(Gates, RelationsAndSources) {
  ExperimentResult r;
  EXPECT_FALSE(r.pass());  // no gates means nothing was certified
  auto s = with({{"tol", "0.5"}});
  r.gate("a", 0.5, "<=", s, "tol", 1.0);
  r.gate("b", 2.0, ">", s, "floor", 1.0);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.gates[0].source, "tol (test)");
  EXPECT_EQ(r.gates[1].source, "floor (default)");
  r.gate("c", 0.6, "<", s, "tol", 1.0);
  EXPECT_FALSE(r.pass());
  EXPECT_THROW(r.gate("d", 1.0, "~", s, "tol", 1.0), std::invalid_argument);
  const auto j = to_json(r);
  EXPECT_FALSE(j.at("pass").get<bool>());
  EXPECT_EQ(j.at("gates").size(), 3u);
}

TEST(Counterexample, IndicatorMatchesErfOracle) {
  for (double t : {0.5, 1.0, 3.0, 40.0}) {
    for (double x : {-2.0, 0.0, 0.7, 5.0}) {
      const double expect =
          oracle::heat_of_interval(t, x, -1, 1) - oracle::heat_of_interval(std::max(0.0, t - 1), x, -1, 1);
      EXPECT_NEAR(indicator_Tf(t, x), expect, 1e-15);
    }
  }
  EXPECT_EQ(indicator_Tf(-1.0, 0.0), 0.0);
}

TEST(Counterexample, GrowthAgainstPlainQuadrature) {
  // trapezoid in both variables on a fine mesh
  auto plain = [](double lo, double hi) {
    const int nt = 4000;
    double total = 0.0;
    for (int i = 0; i <= nt; ++i) {
      const double t = lo + (hi - lo) * i / nt;
      const double top = 0.5 * std::sqrt(t);
      const int nx = 2000;
      double inner = 0.0;
      for (int k = 0; k <= nx; ++k) {
        const double x = top * k / nx;
        inner += (k == 0 || k == nx ? 0.5 : 1.0) * std::abs(indicator_Tf(t, x));
      }
      inner *= 2.0 * top / nx;
      total += (i == 0 || i == nt ? 0.5 : 1.0) * inner;
    }
    return total * (hi - lo) / nt;
  };
  const auto I = indicator_growth({8.0, 16.0}, 4.0);
  EXPECT_NEAR(I[0], plain(4.0, 8.0), 1e-5 * I[0]);
  EXPECT_NEAR(I[1] - I[0], plain(8.0, 16.0), 1e-5 * I[1]);
  EXPECT_THROW(indicator_growth({2.0}, 4.0), std::invalid_argument);
}

TEST(Counterexample, TstarConstantClosedForms) {
  EXPECT_NEAR(tstar_constant(1), std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5), 1e-12);
  EXPECT_NEAR(tstar_constant(1), 0.48394, 1e-5);
  EXPECT_NEAR(tstar_constant(2), 2.0 * std::exp(-1.0), 1e-12);
}

TEST(Counterexample, TstarGrowthIsExactlyLogarithmic) {
  // scaling z -> sqrt(u) z turns the inner integral into c / u
  for (int dim : {1, 2}) {
    const double c = tstar_constant(dim);
    const auto G = tstar_growth({2.0, 16.0, 256.0}, 1.0, dim);
    EXPECT_NEAR(G[0], c * std::log(2.0), 1e-10);
    EXPECT_NEAR(G[2], c * std::log(256.0), 1e-9);
  }
}

TEST(GrowthFit, RecoversLine) {
  std::vector<double> T{8, 16, 32, 64}, v;
  for (double t : T) v.push_back(0.3 + 0.25 * std::log(t));
  const auto fit = fit_log_growth(T, v);
  EXPECT_NEAR(fit.slope, 0.25, 1e-12);
  EXPECT_NEAR(fit.intercept, 0.3, 1e-12);
  EXPECT_LT(fit.rms_residual, 1e-12);
  EXPECT_THROW(fit_log_growth({1.0}, {1.0}), std::invalid_argument);
}

TEST(NormProbe, ZeroInputConvention) {
  const SpaceTimeGrid g(1, 4.0, 0.5, 0.0, 4.0, 0.5);
  EXPECT_EQ(empirical_ratio(GridFunction(g), 2.0), 0.0);
  EXPECT_EQ(empirical_ratio(GridFunction(g), 1.0), 0.0);
}

TEST(NormProbe, InputsAreDeterministicAndNonzero) {
  const SpaceTimeGrid g(2, 4.0, 0.5, 0.0, 4.0, 0.5);
  const auto a = probe_inputs(g, 9, 4);
  const auto b = probe_inputs(g, 9, 4);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GT(lp_norm(a[i], 2), 0.0);
    EXPECT_EQ(lp_norm(a[i] - b[i], 1), 0.0);
  }
  EXPECT_GT(lp_norm(a[0] - probe_inputs(g, 10, 1)[0], 1), 0.0);
}

TEST(Boundary, StepAtomIsANormalizedAtom) {
  const ParabolicBall q(SpacePoint::make(2.0, 1.0), 1.0);
  const SpaceTimeGrid g(1, 8.0, 0.125, 0.0, 16.0, 0.125);
  const auto a = step_atom(q, g);
  const auto c = validate_atom(a, q, AtomKind::classical_2);
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.size_slack, 1.0, 1e-12);
  EXPECT_THROW(step_atom(ParabolicBall(SpacePoint::make(2.0, 1.0), 20.0), g), std::invalid_argument);
}

TEST(Boundary, DirichletLeakMatchesErfIdentity) {
  // int_0^tmax int_0^inf T a = int a(s, y) erf(y / sqrt(4 (tmax - s))) for Dirichlet
  using boost::math::quadrature::gauss_kronrod;
  const double tmax = 16.0;
  const ParabolicBall q(SpacePoint::make(2.0, 1.0), 1.0);
  const SpaceTimeGrid g(1, 48.0, 0.125, 0.0, tmax, 0.125);  // wide enough to keep the mass
  const auto a = step_atom(q, g);
  double expect = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const auto p = g.cell_center(i);
    const double s0 = p.t - 0.0625, s1 = p.t + 0.0625, y0 = p.x[0] - 0.0625, y1 = p.x[0] + 0.0625;
    auto inner = [&](double s) {
      return gauss_kronrod<double, 15>::integrate(
          [&](double y) { return std::erf(y / std::sqrt(4 * (tmax - s))); }, y0, y1, 5, 1e-14);
    };
    expect += a[i] * gauss_kronrod<double, 15>::integrate(inner, s0, s1, 5, 1e-14);
  }
  const double got = windowed_moment(a, KernelSpec{1, Boundary::half_line_dirichlet});
  EXPECT_NEAR(got, expect, 2e-3 * std::abs(expect));
  EXPECT_GT(std::abs(got), 1e-2);
  EXPECT_LT(std::abs(windowed_moment(a, KernelSpec{1, Boundary::half_line_neumann})), 1e-12);
}

TEST(CertifyOnAtom, ZeroAtomIsTriviallyCertified) {
  const ParabolicBall q(SpacePoint::make(20.0, 0.0), 1.0);
  const GridFunction zero(aligned_atom_grid(q, AtomKind::classical_inf));
  const auto run = certify_T_on_atom(zero, q, AtomKind::classical_inf, 0.5, 3);
  EXPECT_EQ(run.relative_moment, 0.0);
  EXPECT_EQ(run.report.constant, 0.0);
  EXPECT_TRUE(run.report.certifies(0.0, 0.0));
}

TEST(CertifyOnAtom, RejectsNonAtoms) {
  const ParabolicBall q(SpacePoint::make(20.0, 0.0), 1.0);
  auto a = make_atom(q, AtomKind::classical_inf, 3);
  a *= 3.0;
  EXPECT_THROW(certify_T_on_atom(a, q, AtomKind::classical_inf, 0.5, 3), std::invalid_argument);
}

TEST(CertifyOnAtom, FarFromBoundaryMomentIsSmall) {
  const auto placed = random_placed_atom(AtomKind::classical_inf, 11, 1, 20.0, 20.0);
  const auto run = certify_on_atom(placed.atom, placed.ball, AtomKind::classical_inf,
                                   OperatorField::Direction::forward, 0.5, 8, {}, {64, 128, 64, 128});
  EXPECT_TRUE(run.certificate.pass);
  EXPECT_LE(run.relative_moment, 1e-6);
  EXPECT_GE(run.report.fitted_alpha, 0.5);
}

TEST(RandomPlacedAtom, DeterministicAndValid) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto a = random_placed_atom(AtomKind::type_b, seed, 1, 4.0, 15.875);
    const auto b = random_placed_atom(AtomKind::type_b, seed, 1, 4.0, 15.875);
    EXPECT_EQ(a.ball.center().t, b.ball.center().t);
    EXPECT_EQ(lp_norm(a.atom - b.atom, 1), 0.0);
    EXPECT_TRUE(validate_atom(a.atom, a.ball, AtomKind::type_b).pass);
    EXPECT_GE(a.ball.center().t, 4.0);
    EXPECT_LE(a.ball.center().t, 15.875);
    EXPECT_LE(std::abs(a.ball.center().x[0]), 4.0);
  }
}

TEST(MeanValue, SpatialMeansVanishPerTime) {
  const auto placed = random_placed_atom(AtomKind::classical_inf, 5, 1, 3.0, 3.0);
  const OperatorField field(placed.atom, KernelSpec{}, OperatorField::Direction::forward);
  const auto times = slice_times(field.support_t_lo(), 64.0, 6);
  ASSERT_EQ(times.size(), 6u);
  EXPECT_NEAR(times.back(), field.support_t_lo() + 64.0, 1e-12);
  for (std::size_t k = 1; k < times.size(); ++k) EXPECT_GT(times[k], times[k - 1]);
  for (double t : times) {
    const auto sl = spatial_slice(field, placed.ball, t);
    EXPECT_GT(sl.l1, 0.0);
    EXPECT_LT(sl.relative, 1e-10) << t;
  }
  // before the support everything is zero
  const auto before = spatial_slice(field, placed.ball, 0.5);
  EXPECT_EQ(before.l1, 0.0);
  EXPECT_EQ(before.relative, 0.0);
}

TEST(Catalogue, ListsAndDescribes) {
  const auto& cat = experiment_catalogue();
  EXPECT_GE(cat.size(), 8u);
  EXPECT_THROW(find_experiment("nope"), std::invalid_argument);
  EXPECT_NE(find_experiment("certify-T").reference.find("certify_T_on_atom"), std::string::npos);
  EXPECT_NE(find_experiment("counterexample-T").reference.find("counterexample_T"), std::string::npos);
  for (const auto& e : cat) {
    EXPECT_FALSE(e.claim.empty());
    EXPECT_FALSE(e.parameters.empty());
  }
}

TEST(Catalogue, SettingsCheck) {
  const auto& info = find_experiment("lp-probe");
  EXPECT_NO_THROW(check_settings(info, with({{"seed", "3"}, {"p_values", "2"}})));
  EXPECT_THROW(check_settings(info, with({{"samplez", "3"}})), std::invalid_argument);
  EXPECT_NO_THROW(check_settings(find_experiment("certify-T"), with({{"cells_t", "8"}})));
}

TEST(Experiments, InvalidConfigurations) {
  EXPECT_THROW(run_counterexample_T(with({{"n", "2"}})), std::invalid_argument);
  EXPECT_THROW(run_counterexample_T(with({{"tmax", "16"}})), std::invalid_argument);
  EXPECT_THROW(run_certify_T(with({{"n", "3"}})), std::invalid_argument);
  EXPECT_THROW(run_lp_probe(with({{"p_values", "1,2"}})), std::invalid_argument);
  EXPECT_THROW(run_boundary_dichotomy(with({{"t0", "0.5"}})), std::invalid_argument);
}

TEST(Experiments, CounterexampleTstarInTheLine) {
  const auto r = run_counterexample_Tstar(with({}));
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.tables.at(0).columns, (std::vector<std::string>{"T", "G_T"}));
  EXPECT_EQ(to_json(r).dump(), to_json(run_counterexample_Tstar(with({}))).dump());
}

TEST(Experiments, SmallCertifyRunIsDeterministic) {
  const auto s = with({{"samples", "2"}, {"annuli", "4"}});
  const auto a = run_certify_T(s);
  const auto b = run_certify_T(s);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(a.tables.at(0).rows.size(), 2u);
  EXPECT_TRUE(a.pass());
}
