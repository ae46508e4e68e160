#include "flocklab/frequency_response.hpp"

#include "flocklab/errors.hpp"
#include "flocklab/kernels.hpp"
#include "flocklab/spectrum.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace flocklab {

namespace {

using Cd = std::complex<double>;

// Gaussian elimination that carries the row sums of the active submatrix
// alongside its off-diagonal entries and rebuilds each pivot as
// (row sum - off-diagonal sum). For Laplacian-structured systems the row sums
// are small quantities known exactly from the leader coupling, and the usual
// update of the diagonal would lose them to cancellation. Symmetric
// (diagonal) pivoting keeps every row's own column on the diagonal.
// Returns nullopt when a pivot vanishes or the result is not finite.
std::optional<ComplexVector> rowsum_solve(Eigen::MatrixXcd A, ComplexVector s,
                                          ComplexVector b)
{
  const Eigen::Index n = A.rows();
  std::vector<Eigen::Index> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  ComplexVector pivot(n);

  auto diagonal = [&](Eigen::Index i) {
    Cd off(0.0, 0.0);
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i && !done[static_cast<std::size_t>(j)])
        off += A(i, j);
    return s(i) - off;
  };

  for (Eigen::Index step = 0; step < n; ++step) {
    Eigen::Index p = -1;
    Cd dp(0.0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)])
        continue;
      const Cd d = diagonal(i);
      if (p < 0 || std::abs(d) > std::abs(dp)) {
        p = i;
        dp = d;
      }
    }
    if (dp == Cd(0.0, 0.0) || !std::isfinite(std::abs(dp)))
      return std::nullopt;
    done[static_cast<std::size_t>(p)] = 1;
    order.push_back(p);
    pivot(p) = dp;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)] || A(i, p) == Cd(0.0, 0.0))
        continue;
      const Cd m = A(i, p) / dp;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i && !done[static_cast<std::size_t>(j)])
          A(i, j) -= m * A(p, j);
      s(i) -= m * s(p);
      b(i) -= m * b(p);
      A(i, p) = 0.0;
    }
  }

  ComplexVector x = ComplexVector::Zero(n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Eigen::Index p = *it;
    Cd acc = b(p);
    for (auto jt = order.rbegin(); jt != it; ++jt)
      acc -= A(p, *jt) * x(*jt);
    x(p) = acc / pivot(p);
  }
  if (!x.allFinite())
    return std::nullopt;
  return x;
}

// Row sums of the follower rows over all agents (zero for well-formed models).
Vector full_row_sums(const Matrix& ff, const Matrix& fl)
{
  return ff.rowwise().sum() + fl.rowwise().sum();
}

} // namespace

ResponseSolver::ResponseSolver(const LinearFlockModel& m)
    : blocks_(follower_reduction(m)),
      f_(m.f()),
      g_(m.g()),
      agents_(m.agent_count()),
      last_(m.last_agent())
{
  rowsum_rho_ = full_row_sums(blocks_.ff_rho, blocks_.fl_rho);
  rowsum_r_ = full_row_sums(blocks_.ff_r, blocks_.fl_r);
}

ComplexVector ResponseSolver::solve(double omega) const
{
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw Error(fmt::format("response_at: omega must be positive, got {}", omega));

  const auto nf = blocks_.ff_rho.rows();
  ComplexVector a = ComplexVector::Ones(agents_);
  if (nf == 0)
    return a;

  const Cd iwg(0.0, omega * g_);
  const Eigen::MatrixXcd A =
      f_ * blocks_.ff_rho.cast<Cd>() + iwg * blocks_.ff_r.cast<Cd>();
  const ComplexVector lead_rho = blocks_.fl_rho.rowwise().sum().cast<Cd>();
  const ComplexVector lead_r = blocks_.fl_r.rowwise().sum().cast<Cd>();
  const ComplexVector rhs = -(f_ * lead_rho + iwg * lead_r);
  // row sums of omega^2 I + f Lff_rho + i omega g Lff_r, using
  // Lff 1 = (full row sum) - Lfl 1 so that no cancellation occurs
  ComplexVector s = f_ * (rowsum_rho_.cast<Cd>() - lead_rho) +
                    iwg * (rowsum_r_.cast<Cd>() - lead_r);
  s.array() += omega * omega;

  const auto af = rowsum_solve(A, std::move(s), rhs);
  if (!af)
    throw SingularSystemError(
        omega, fmt::format("follower system is singular at omega = {}", omega));

  for (Eigen::Index i = 0; i < nf; ++i)
    a(blocks_.followers[static_cast<std::size_t>(i)]) = (*af)(i);
  return a;
}

double ResponseSolver::slow_frequency() const
{
  const auto nf = blocks_.ff_rho.rows();
  if (nf == 0 || !(f_ < 0.0))
    return 0.0;
  const ComplexVector lead = blocks_.fl_rho.rowwise().sum().cast<Cd>();
  const ComplexVector s = rowsum_rho_.cast<Cd>() - lead;
  const auto x = rowsum_solve(blocks_.ff_rho.cast<Cd>(), s,
                              ComplexVector::Ones(nf));
  if (!x)
    return 0.0;
  return std::sqrt(-f_ / x->cwiseAbs().maxCoeff());
}

double ResponseSolver::gain(double omega) const
{
  return std::abs(solve(omega)(last_));
}

ComplexVector response_at(const LinearFlockModel& m, double omega)
{
  return ResponseSolver(m).solve(omega);
}

namespace {

void check_grid(std::span<const double> grid)
{
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
      throw Error(fmt::format("grid point {} is not positive: {}", i, grid[i]));
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw Error(fmt::format("grid is not increasing at index {}", i));
  }
}

} // namespace

ResponseTable sweep(const LinearFlockModel& m, std::span<const double> grid,
                    Execution exec)
{
  check_grid(grid);
  const ResponseSolver solver(m);
  ResponseTable table;
  table.rows = exec == Execution::Parallel
                   ? kernels::parallel::response_sweep(solver, grid)
                   : kernels::serial::response_sweep(solver, grid);
  return table;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw Error("log_grid: need 0 < lo < hi and at least 2 points");
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) /
                            static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_grid()
{
  return log_grid(1e-4, 1e2, 2000);
}

std::vector<double> pole_seeded_grid(const LinearFlockModel& m,
                                     std::size_t points)
{
  return pole_seeded_grid(eigenvalues(companion_matrix(m)), points,
                          ResponseSolver(m).slow_frequency());
}

std::vector<double> pole_seeded_grid(const std::vector<Complex>& eigs,
                                     std::size_t points, double slow_frequency)
{
  constexpr double hi = 1e2;
  constexpr double default_lo = 1e-4;
  double lo = default_lo;
  for (const Complex& l : eigs)
    if (std::abs(l) > 0.0)
      lo = std::min(lo, 0.1 * std::abs(l));
  if (slow_frequency > 0.0)
    lo = std::min(lo, 0.1 * slow_frequency);
  if (lo < default_lo)
    points = static_cast<std::size_t>(std::ceil(
        static_cast<double>(points) * std::log(hi / lo) / std::log(hi / default_lo)));

  std::vector<double> grid = log_grid(lo, hi, points);
  for (const Complex& l : eigs) {
    const double w = std::abs(l.imag());
    if (w > lo && w < hi)
      grid.push_back(w);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return b <= a * (1.0 + 1e-14); }),
             grid.end());
  return grid;
}

PeakGain peak_gain(const LinearFlockModel& m, std::span<const double> grid,
                   int refine_iters, Execution exec)
{
  check_grid(grid);
  if (grid.empty())
    throw Error("peak_gain: empty grid");

  const ResponseSolver solver(m);
  const std::vector<double> gains =
      exec == Execution::Parallel ? kernels::parallel::gain_sweep(solver, grid)
                                  : kernels::serial::gain_sweep(solver, grid);

  const auto best_it = std::max_element(gains.begin(), gains.end());
  if (*best_it < 0.0)
    throw NumericError("peak_gain: response solve failed at every grid point");
  const auto i = static_cast<std::size_t>(best_it - gains.begin());
  PeakGain best{grid[i], *best_it};
  if (refine_iters <= 0 || grid.size() < 2)
    return best;

  // golden-section search on u = log(omega)
  double a = std::log(grid[i == 0 ? 0 : i - 1]);
  double b = std::log(grid[std::min(i + 1, grid.size() - 1)]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double u) {
    const double w = std::exp(u);
    double gval = -1.0;
    try {
      gval = solver.gain(w);
    }
    catch (const SingularSystemError&) {
      // a probe that hits a numerically singular system is skipped, as on
      // the grid
    }
    if (gval > best.gain)
      best = {w, gval};
    return gval;
  };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  for (int it = 0; it < refine_iters; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    }
    else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

} // namespace flocklab
