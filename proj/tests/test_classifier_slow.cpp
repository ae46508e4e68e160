#include "flocklab/stability.hpp"

#include <gtest/gtest.h>

using namespace flocklab;

// Verdicts across the asymmetry range on the desk-scale family
// (f = -1, g = -2, r = rho, N in {25, 50, 100}): stable only at rho = 1/2.
class Dichotomy : public ::testing::TestWithParam<double>
{
};

TEST_P(Dichotomy, StableOnlyAtHalf)
{
  const double rho = GetParam();
  const auto c = classify(standard_family(rho, rho, -1.0, -2.0));
  RecordProperty("harmonic_slope", std::to_string(c.harmonic.slope));
  RecordProperty("impulse_slope", std::to_string(c.impulse.slope));
  if (rho == 0.5)
    EXPECT_EQ(c.verdict, Verdict::FlockStable)
        << c.harmonic.slope << " " << c.impulse.slope;
  else
    EXPECT_NE(c.verdict, Verdict::FlockStable)
        << c.harmonic.slope << " " << c.impulse.slope;
}

INSTANTIATE_TEST_SUITE_P(Rho, Dichotomy, ::testing::Values(0.3, 0.45, 0.5, 0.55, 0.7));
