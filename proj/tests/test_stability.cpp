#include "flocklab/errors.hpp"
#include "flocklab/spectrum.hpp"
#include "flocklab/stability.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace flocklab;

namespace {

LinearFlockModel standard(int N, double rho, double f = -1, double g = -2)
{
  StandardExampleParams p;
  p.followers = N;
  p.rho = p.r = rho;
  p.f = f;
  p.g = g;
  return build_standard_example(p);
}

// Standard Laplacians with the gain signs flipped, which the standard
// builder rejects.
LinearFlockModel antistable(int N, double rho)
{
  const auto m = standard(N, rho);
  return LinearFlockModel(m.leaders(), m.L_rho(), m.L_r(), 1.0, 2.0, m.offsets());
}

} // namespace

TEST(FitExponent, ExactLineRecovered)
{
  const std::vector<int> N{25, 50, 100};
  std::vector<double> y;
  for (int n : N)
    y.push_back(0.37 * n - 2.0);
  const auto e = fit_exponent(N, y);
  EXPECT_NEAR(e.slope, 0.37, 1e-12);
  EXPECT_NEAR(e.log_coefficient, 0.0, 1e-10);
  EXPECT_NEAR(e.linear_slope, 0.37, 1e-12);
  EXPECT_NEAR(e.linear_intercept, -2.0, 1e-10);
  EXPECT_LT(e.residual, 1e-12);
}

TEST(FitExponent, AgreesWithNormalEquationsOracle)
{
  const std::vector<int> N{10, 20, 35, 60, 100};
  const std::vector<double> y{0.3, 1.1, 1.6, 2.9, 4.2};
  std::vector<oracle::ld> cN, cl, c1, yy;
  for (std::size_t i = 0; i < N.size(); ++i) {
    cN.push_back(N[i]);
    cl.push_back(std::log(static_cast<oracle::ld>(N[i])));
    c1.push_back(1.0L);
    yy.push_back(y[i]);
  }
  const auto full = oracle::least_squares({cN, cl, c1}, yy);
  const auto line = oracle::least_squares({cN, c1}, yy);
  const auto e = fit_exponent(N, y);
  EXPECT_NEAR(e.slope, static_cast<double>(full[0]), 1e-10);
  EXPECT_NEAR(e.log_coefficient, static_cast<double>(full[1]), 1e-9);
  EXPECT_NEAR(e.intercept, static_cast<double>(full[2]), 1e-8);
  EXPECT_NEAR(e.linear_slope, static_cast<double>(line[0]), 1e-12);
}

TEST(FitExponent, PureLogGrowthHasZeroSlope)
{
  const std::vector<int> N{25, 50, 100};
  std::vector<double> y;
  for (int n : N)
    y.push_back(std::log(static_cast<double>(n)) + 1.0);
  const auto e = fit_exponent(N, y);
  EXPECT_NEAR(e.slope, 0.0, 1e-12);
  EXPECT_NEAR(e.log_coefficient, 1.0, 1e-10);
  EXPECT_GT(e.linear_slope, 0.01);
}

TEST(FitExponent, ConstantFamilyHasZeroSlope)
{
  const auto e = fit_exponent({25, 50, 100}, {1.5, 1.5, 1.5});
  EXPECT_NEAR(e.slope, 0.0, 1e-12);
  EXPECT_NEAR(e.linear_slope, 0.0, 1e-14);
}

TEST(FitExponent, InputErrors)
{
  EXPECT_THROW(fit_exponent({25, 50}, {1, 2}), Error);
  EXPECT_THROW(fit_exponent({25, 25, 50}, {1, 2, 3}), Error);
  EXPECT_THROW(fit_exponent({0, 25, 50}, {1, 2, 3}), Error);
  EXPECT_THROW(fit_exponent({25, 50, 100}, {1, 2}), Error);
  EXPECT_THROW(fit_exponent({25, 50, 100}, {1, NAN, 3}), NumericError);
}

TEST(Verdict, FromSlopes)
{
  EXPECT_EQ(verdict_from_slopes(0.0, 0.0, 0.01), Verdict::FlockStable);
  EXPECT_EQ(verdict_from_slopes(0.01, 0.01, 0.01), Verdict::FlockStable);
  EXPECT_EQ(verdict_from_slopes(0.2, 0.0, 0.01), Verdict::HarmonicallyUnstable);
  EXPECT_EQ(verdict_from_slopes(0.0, 0.2, 0.01), Verdict::ImpulseUnstable);
  EXPECT_EQ(verdict_from_slopes(0.2, 0.2, 0.01), Verdict::BothUnstable);
  EXPECT_EQ(to_string(Verdict::BothUnstable), "both-unstable");
  EXPECT_EQ(to_string(Verdict::FlockStable), "flock-stable");
}

TEST(ScalingFit, ExponentialData)
{
  const auto fit = scaling_fit({2, 4, 8, 16}, {1, 2, 3, 4});
  EXPECT_EQ(fit.preferred, ScalingLaw::Exponential);
  EXPECT_NEAR(fit.exp_rate, std::numbers::ln2, 1e-12);
  EXPECT_LT(fit.exp_residual, 1e-12);
}

TEST(ScalingFit, PowerData)
{
  const std::vector<int> N{10, 20, 40, 80};
  std::vector<double> p;
  for (int n : N)
    p.push_back(3.0 * n * n);
  const auto fit = scaling_fit(p, N);
  EXPECT_EQ(fit.preferred, ScalingLaw::Power);
  EXPECT_NEAR(fit.power_exponent, 2.0, 1e-12);
  EXPECT_NEAR(std::exp(fit.power_intercept), 3.0, 1e-10);
}

TEST(ScalingFit, Errors)
{
  EXPECT_THROW(scaling_fit({1.0}, {1}), Error);
  EXPECT_THROW(scaling_fit({1.0, 0.0}, {1, 2}), Error);
  EXPECT_THROW(scaling_fit({1.0, 2.0}, {1, 2, 3}), Error);
}

TEST(ScalingFit, SymmetricFlockPeaksGrowPolynomially)
{
  const std::vector<int> N{20, 40, 80, 160};
  std::vector<double> peaks;
  for (int n : N)
    peaks.push_back(peak_gain(standard(n, 0.5), pole_seeded_grid(standard(n, 0.5))).gain);
  const auto fit = scaling_fit(peaks, N);
  EXPECT_EQ(fit.preferred, ScalingLaw::Power);
  EXPECT_GT(fit.power_exponent, 0.5);
  EXPECT_LT(fit.power_exponent, 1.5);
}

TEST(Harmonic, AsymmetricFamilyGrowsMonotonically)
{
  const auto e = harmonic_exponent(standard_family(0.45, 0.45, -1, -2, {10, 20, 40}));
  ASSERT_EQ(e.per_N_values.size(), 3u);
  EXPECT_LT(e.per_N_values[0], e.per_N_values[1]);
  EXPECT_LT(e.per_N_values[1], e.per_N_values[2]);
  EXPECT_GT(e.linear_slope, 0.01);
}

TEST(Harmonic, SerialAndParallelAgree)
{
  const auto fam = standard_family(0.55, 0.55, -1, -2, {5, 10, 15});
  HarmonicOptions s;
  s.exec = Execution::Serial;
  HarmonicOptions p;
  p.exec = Execution::Parallel;
  EXPECT_EQ(harmonic_exponent(fam, s).per_N_values, harmonic_exponent(fam, p).per_N_values);
}

TEST(Impulse, ZeroVelocityGivesZeroSlope)
{
  const auto e = impulse_exponent(standard_family(0.45, 0.45, -1, -2, {5, 10, 15}), 0.0);
  EXPECT_EQ(e.slope, 0.0);
  EXPECT_EQ(e.linear_slope, 0.0);
  for (double v : e.per_N_values)
    EXPECT_TRUE(std::isinf(v) && v < 0);
}

TEST(Stabilized, UnstableMemberNamed)
{
  try {
    require_stabilized(antistable(4, 0.5), 4);
    FAIL() << "expected FamilyError";
  } catch (const FamilyError& e) {
    EXPECT_EQ(e.followers(), 4);
    EXPECT_NE(std::string(e.what()).find("N = 4"), std::string::npos);
  }
  EXPECT_NO_THROW(require_stabilized(standard(30, 0.45), 30));
}

TEST(Stabilized, IllConditionedStableMemberAccepted)
{
  // Every follower Laplacian eigenvalue is positive (long double oracle), so
  // the member is stabilized even though double precision cannot place the
  // slowest companion eigenvalues on the left of the axis.
  for (const auto& mu : oracle::standard_lff_eigs(50, 0.7L))
    ASSERT_GT(mu, 0.0L);
  EXPECT_NO_THROW(require_stabilized(standard(50, 0.7), 50));
}

TEST(Spectrum, ConditionNumbers)
{
  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << -1.0, -2.0, -3.0;
  for (const auto& e : conditioned_eigenvalues(D))
    EXPECT_NEAR(e.condition, 1.0, 1e-12);
  Matrix J(2, 2);
  J << -1.0, 1e6, 0.0, -1.001;
  const auto c = conditioned_eigenvalues(J);
  EXPECT_GT(c[0].condition, 1e3);
  const auto ce = conditioned_eigenvalues(companion_matrix(standard(8, 0.5)));
  const auto plain = eigenvalues(companion_matrix(standard(8, 0.5)));
  ASSERT_EQ(ce.size(), plain.size());
  for (std::size_t i = 0; i < ce.size(); ++i)
    EXPECT_LT(std::abs(ce[i].value - plain[i]), 1e-10);
}

TEST(Classify, RejectsShortNList)
{
  EXPECT_THROW(classify(standard_family(0.5, 0.5, -1, -2, {10, 20})), Error);
}
