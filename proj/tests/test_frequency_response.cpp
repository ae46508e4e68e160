#include "flocklab/errors.hpp"
#include "flocklab/frequency_response.hpp"
#include "flocklab/linear_dynamics.hpp"
#include "flocklab/spectrum.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <numbers>

using namespace flocklab;

namespace {

LinearFlockModel standard(int N, double rho, double r = -1)
{
  StandardExampleParams p;
  p.followers = N;
  p.rho = rho;
  p.r = r < 0 ? rho : r;
  return build_standard_example(p);
}

} // namespace

TEST(Response, LowFrequencyLimit)
{
  const auto a = response_at(standard(50, 0.5), 1e-3);
  EXPECT_LT((a.array() - 1.0).abs().maxCoeff(), 1e-2);
}

TEST(Response, LowFrequencyDeviationDecreases)
{
  const auto m = standard(20, 0.45);
  double prev = 1e300;
  for (double w : {1e-1, 1e-2, 1e-3}) {
    const double dev = (response_at(m, w).array() - 1.0).abs().maxCoeff();
    EXPECT_LT(dev, prev);
    prev = dev;
  }
}

TEST(Response, SingleFollowerClosedForm)
{
  const auto m = standard(1, 0.5);
  for (double w : log_grid(1e-3, 1e2, 100)) {
    const auto a = response_at(m, w);
    const auto ref = oracle::single_follower_response(-1.0L, -2.0L, w);
    EXPECT_LT(std::abs(a(1) - Complex(ref.real(), ref.imag())), 1e-10) << w;
  }
}

TEST(Response, LeaderEntriesExactlyOne)
{
  const auto a = response_at(build_random(10, 4, -1, -2), 0.37);
  EXPECT_EQ(a(0), Complex(1.0, 0.0));
}

TEST(Response, HighFrequencyDecay)
{
  EXPECT_LT(ResponseSolver(standard(5, 0.5)).gain(1e3), 1e-2);
}

TEST(Response, MatchesRecursionOracle)
{
  for (double rho : {0.45, 0.5, 0.55})
    for (double w : {0.003, 0.05, 0.4, 2.0}) {
      const auto a = response_at(standard(30, rho, 0.4), w);
      const auto ref = oracle::standard_response(30, rho, 0.4L, -1.0L, -2.0L, w);
      for (int k = 0; k <= 30; ++k) {
        const Complex rk(static_cast<double>(ref[k].real()), static_cast<double>(ref[k].imag()));
        EXPECT_LT(std::abs(a(k) - rk), 1e-9 * std::max(1.0, std::abs(rk)));
      }
    }
}

TEST(Response, ConjugateSymmetry)
{
  const auto m = standard(8, 0.45);
  const ResponseSolver s(m);
  const double w = 0.31;
  // the system at -w is the complex conjugate of the system at +w
  const auto b = follower_reduction(m);
  const Eigen::MatrixXcd A =
      (w * w) * Eigen::MatrixXcd::Identity(8, 8) + m.f() * b.ff_rho.cast<Complex>() +
      Complex(0, -w) * m.g() * b.ff_r.cast<Complex>();
  const Eigen::VectorXcd rhs =
      -(m.f() * b.fl_rho.cast<Complex>() + Complex(0, -w) * m.g() * b.fl_r.cast<Complex>()) *
      Eigen::VectorXcd::Ones(1);
  const Eigen::VectorXcd neg = A.fullPivLu().solve(rhs);
  const auto pos = s.solve(w);
  for (int k = 0; k < 8; ++k)
    EXPECT_LT(std::abs(neg(k) - std::conj(pos(k + 1))), 1e-12);
}

TEST(Response, SingularSystemNamesOmega)
{
  // undamped single follower: resonance at w = 1
  const auto s = standard(1, 0.5);
  const LinearFlockModel m(s.leaders(), s.L_rho(), s.L_r(), -1.0, 0.0, s.offsets());
  try {
    response_at(m, 1.0);
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_EQ(e.omega(), 1.0);
  }
}

TEST(Response, RejectsNonPositiveOmega)
{
  EXPECT_THROW(response_at(standard(3, 0.5), 0.0), Error);
  EXPECT_THROW(response_at(standard(3, 0.5), -1.0), Error);
}

TEST(Sweep, SingletonEqualsResponseAt)
{
  const auto m = standard(6, 0.45);
  const std::vector<double> grid{0.2};
  const auto t = sweep(m, grid);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].amplitudes, response_at(m, 0.2));
}

TEST(Sweep, GainsAreModuli)
{
  const auto t = sweep(standard(6, 0.45), log_grid(1e-2, 10, 30));
  for (const auto& row : t.rows) {
    ASSERT_TRUE(row.ok());
    EXPECT_EQ(row.gains, row.amplitudes.cwiseAbs());
  }
}

TEST(Sweep, PerPointFailureRecorded)
{
  const auto s = standard(1, 0.5);
  const LinearFlockModel m(s.leaders(), s.L_rho(), s.L_r(), -1.0, 0.0, s.offsets());
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const auto t = sweep(m, grid);
  EXPECT_TRUE(t.rows[0].ok());
  EXPECT_FALSE(t.rows[1].ok());
  EXPECT_TRUE(t.rows[2].ok());
}

TEST(Sweep, GridValidation)
{
  const std::vector<double> bad{0.1, 0.1};
  EXPECT_THROW(sweep(standard(2, 0.5), bad), Error);
  const std::vector<double> neg{-0.1, 0.1};
  EXPECT_THROW(sweep(standard(2, 0.5), neg), Error);
}

TEST(Sweep, ScalesOfFigure3)
{
  const auto half = peak_gain(standard(100, 0.5), pole_seeded_grid(standard(100, 0.5)));
  const auto bad = peak_gain(standard(100, 0.55), pole_seeded_grid(standard(100, 0.55)));
  EXPECT_GT(half.gain, 1.0);
  EXPECT_LT(half.gain, 100.0);
  EXPECT_GT(bad.gain, 100.0 * half.gain);
}

TEST(Peak, SingleFollowerClosedForm)
{
  const auto [w_star, g_star] = oracle::single_follower_peak();
  const auto p = peak_gain(standard(1, 0.5), default_grid());
  EXPECT_NEAR(p.gain, static_cast<double>(g_star), 1e-6);
  EXPECT_NEAR(p.omega, static_cast<double>(w_star), 1e-3);
}

TEST(Peak, ZeroRefinementIsGridArgmax)
{
  const auto m = standard(10, 0.45);
  const auto grid = log_grid(1e-3, 10, 200);
  const auto p = peak_gain(m, grid, 0);
  const ResponseSolver s(m);
  double best = -1, best_w = 0;
  for (double w : grid)
    if (s.gain(w) > best) {
      best = s.gain(w);
      best_w = w;
    }
  EXPECT_EQ(p.omega, best_w);
  EXPECT_EQ(p.gain, best);
}

TEST(Peak, AsymmetryRaisesPeak)
{
  const auto grid = default_grid();
  EXPECT_GT(peak_gain(standard(50, 0.45), grid).gain, peak_gain(standard(50, 0.5), grid).gain);
}

TEST(Grid, LogGridEndpoints)
{
  const auto g = log_grid(1e-4, 1e2, 2000);
  ASSERT_EQ(g.size(), 2000u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-4);
  EXPECT_DOUBLE_EQ(g.back(), 1e2);
  EXPECT_EQ(default_grid(), g);
}

TEST(Grid, PoleSeededContainsPoleFrequencies)
{
  const auto m = standard(20, 0.55);
  const auto g = pole_seeded_grid(m);
  for (std::size_t i = 1; i < g.size(); ++i)
    EXPECT_GT(g[i], g[i - 1]);
  EXPECT_LE(g.front(), 1e-4);
  EXPECT_DOUBLE_EQ(g.back(), 1e2);
}

TEST(TimeFrequency, SimulatedForcingMatchesLinearSolve)
{
  const auto m = standard(10, 0.5);
  const double w = 0.5;
  const double period = 2 * std::numbers::pi / w;
  IntegrateOptions o;
  o.dt = 0.01;
  o.horizon = 50 * period;
  o.max_samples = 10'000'000;
  const FlockState init{0.0, Vector::Zero(11), Vector::Zero(11)};
  const auto tr = integrate(m, init, {{0, Sinusoid{1.0, w, 0.0, 0.0}}}, o);

  std::vector<oracle::ld> s, c, one, y;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] < 40 * period)
      continue;
    s.push_back(std::sin(w * tr.times[i]));
    c.push_back(std::cos(w * tr.times[i]));
    one.push_back(1.0L);
    y.push_back(tr.states[i].z(10));
  }
  const auto beta = oracle::least_squares({s, c, one}, y);
  const Complex sim(static_cast<double>(beta[0]), static_cast<double>(beta[1]));
  const Complex lin = response_at(m, w)(10);
  EXPECT_LT(std::abs(std::abs(sim) - std::abs(lin)) / std::abs(lin), 1e-2);
  EXPECT_LT(std::abs(std::arg(sim / lin)), 1e-2);
}

TEST(Response, TinyFrequencyMatchesRatioOracle)
{
  // rho = 0.7 puts the slowest follower mode near omega = 4e-10 at N = 50,
  // below the resolution of a plain LU solve of the shifted system.
  const auto m = standard(50, 0.7);
  const ResponseSolver s(m);
  for (double w : {1e-12, 1e-10, 3.9e-10, 1e-8, 1e-4}) {
    const double ref = static_cast<double>(oracle::standard_gain_ratios(50, 0.7L, 0.7L, -1.0L, -2.0L, w));
    EXPECT_LT(std::abs(s.gain(w) - ref), 1e-8 * ref) << w;
  }
}

TEST(Response, RatioOracleAgreesAtModerateFrequency)
{
  for (double w : {0.01, 0.3, 3.0}) {
    const double ref = static_cast<double>(oracle::standard_gain_ratios(30, 0.45L, 0.4L, -1.0L, -2.0L, w));
    EXPECT_LT(std::abs(ResponseSolver(standard(30, 0.45, 0.4)).gain(w) - ref), 1e-10 * ref);
  }
}

TEST(Response, RandomTopologyMatchesDenseLU)
{
  const auto m = build_random(20, 17, -1.0, -2.0, 0.5);
  const auto b = follower_reduction(m);
  for (double w : {0.05, 0.7, 4.0}) {
    const Eigen::MatrixXcd A =
        (w * w) * Eigen::MatrixXcd::Identity(19, 19) + m.f() * b.ff_rho.cast<Complex>() +
        Complex(0, w) * m.g() * b.ff_r.cast<Complex>();
    const Eigen::VectorXcd rhs =
        -(m.f() * b.fl_rho.cast<Complex>() + Complex(0, w) * m.g() * b.fl_r.cast<Complex>()) *
        Eigen::VectorXcd::Ones(1);
    const Eigen::VectorXcd ref = A.fullPivLu().solve(rhs);
    const auto a = response_at(m, w);
    for (int k = 0; k < 19; ++k)
      EXPECT_LT(std::abs(a(b.followers[k]) - ref(k)), 1e-11 * std::max(1.0, std::abs(ref(k))));
  }
}

TEST(Response, SlowFrequencyIsALowerBound)
{
  for (double rho : {0.45, 0.5, 0.7}) {
    const auto mus = oracle::standard_lff_eigs(25, static_cast<oracle::ld>(rho));
    const oracle::ld mu_min = *std::min_element(mus.begin(), mus.end());
    const double bound = std::sqrt(static_cast<double>(mu_min));
    const double est = ResponseSolver(standard(25, rho)).slow_frequency();
    EXPECT_GT(est, 0.0);
    EXPECT_LE(est, bound * (1 + 1e-9)) << rho;
  }
}

TEST(Peak, StronglyAsymmetricFlockResolved)
{
  // The resonance sits below 1e-9; the pole-seeded grid must reach it.
  const auto m = standard(50, 0.7);
  const auto p = peak_gain(m, pole_seeded_grid(m));
  const double ref = static_cast<double>(oracle::standard_gain_ratios(50, 0.7L, 0.7L, -1.0L, -2.0L, p.omega));
  EXPECT_LT(std::abs(p.gain - ref), 1e-6 * ref);
  EXPECT_GT(std::log(p.gain), 20.0);
}
