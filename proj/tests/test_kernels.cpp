#include "flocklab/errors.hpp"
#include "flocklab/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

using namespace flocklab;

namespace {

LinearFlockModel standard(int N, double rho)
{
  StandardExampleParams p;
  p.followers = N;
  p.rho = p.r = rho;
  return build_standard_example(p);
}

} // namespace

TEST(Kernels, ResponseSweepBitForBit)
{
  const ResponseSolver s(standard(40, 0.45));
  const auto grid = log_grid(1e-4, 1e2, 500);
  const auto a = kernels::serial::response_sweep(s, grid);
  const auto b = kernels::parallel::response_sweep(s, grid);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].omega, b[i].omega);
    EXPECT_EQ(a[i].amplitudes, b[i].amplitudes);
    EXPECT_EQ(a[i].gains, b[i].gains);
    EXPECT_EQ(a[i].error, b[i].error);
  }
}

TEST(Kernels, GainSweepBitForBitAndMatchesSolver)
{
  const ResponseSolver s(build_random(25, 3, -1.0, -2.0));
  const auto grid = log_grid(1e-3, 10, 300);
  const auto a = kernels::serial::gain_sweep(s, grid);
  const auto b = kernels::parallel::gain_sweep(s, grid);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < grid.size(); i += 37)
    EXPECT_EQ(a[i], s.gain(grid[i]));
}

TEST(Kernels, GainSweepMarksFailures)
{
  const auto st = standard(1, 0.5);
  const LinearFlockModel m(st.leaders(), st.L_rho(), st.L_r(), -1.0, 0.0, st.offsets());
  const ResponseSolver s(m);
  const std::vector<double> grid{0.5, 1.0};
  const auto a = kernels::parallel::gain_sweep(s, grid);
  EXPECT_GT(a[0], 0.0);
  EXPECT_EQ(a[1], -1.0);
  EXPECT_FALSE(kernels::serial::response_sweep(s, grid)[1].ok());
}

TEST(Kernels, MapPreservesOrder)
{
  std::vector<int> items(101);
  for (int i = 0; i < 101; ++i)
    items[i] = i;
  auto fn = [](int i) { return std::sqrt(static_cast<double>(i)) * 3.0; };
  EXPECT_EQ(kernels::serial::map(items, fn), kernels::parallel::map(items, fn));
}

TEST(Kernels, MapRethrowsLowestFailingIndex)
{
  const std::vector<int> items{1, 2, 3, 4, 5, 6};
  auto fn = [](int i) -> int {
    if (i % 3 == 0)
      throw std::runtime_error("item " + std::to_string(i));
    return i;
  };
  for (int pass = 0; pass < 2; ++pass) {
    try {
      if (pass == 0)
        kernels::serial::map(items, fn);
      else
        kernels::parallel::map(items, fn);
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "item 3");
    }
  }
}

TEST(Kernels, SweepExecutionModesAgree)
{
  const auto m = standard(30, 0.55);
  const auto grid = pole_seeded_grid(m, 400);
  const auto a = sweep(m, grid, Execution::Serial);
  const auto b = sweep(m, grid, Execution::Parallel);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    EXPECT_EQ(a.rows[i].amplitudes, b.rows[i].amplitudes);
  const auto pa = peak_gain(m, grid, 60, Execution::Serial);
  const auto pb = peak_gain(m, grid, 60, Execution::Parallel);
  EXPECT_EQ(pa.omega, pb.omega);
  EXPECT_EQ(pa.gain, pb.gain);
}

TEST(Kernels, ConfigureThreadsHonorsEnvironment)
{
  ::setenv("FLOCKLAB_THREADS", "1", 1);
  EXPECT_EQ(kernels::configure_threads(), 1);
  ::unsetenv("FLOCKLAB_THREADS");
  EXPECT_GE(kernels::configure_threads(), 1);
}
