#pragma once

#include "flocklab/flock_model.hpp"
#include "flocklab/linear_dynamics.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flocklab {

using ComplexVector = Eigen::VectorXcd;

/// Steady-state amplitudes a(omega) under a unit harmonic leader e^{i omega t}
/// (all leaders driven in phase). Holds the follower blocks so repeated
/// solves do not re-partition the model; safe for concurrent const use.
class ResponseSolver
{
public:
  explicit ResponseSolver(const LinearFlockModel& m);

  /// Full amplitude vector, leader entries exactly 1. Solves
  /// (omega^2 I + f Lff_rho + i omega g Lff_r) a_f
  ///     = -(f Lfl_rho + i omega g Lfl_r) 1
  /// by elimination with diagonal pivoting that tracks row sums, which keeps
  /// the tiny row sums of Laplacian systems exact near omega = 0. Throws
  /// SingularSystemError on a vanishing pivot.
  ComplexVector solve(double omega) const;

  /// |a_N(omega)| for the last agent.
  double gain(double omega) const;

  int agent_count() const noexcept { return agents_; }

  /// sqrt(|f| / |Lff_rho^{-1} 1|_inf), a lower estimate of the frequency of
  /// the slowest follower mode (exact bound when Lff_rho is an M-matrix).
  /// 0 when f >= 0 or Lff_rho is singular.
  double slow_frequency() const;

private:
  FollowerBlocks blocks_;
  Vector rowsum_rho_;
  Vector rowsum_r_;
  double f_;
  double g_;
  int agents_;
  int last_;
};

ComplexVector response_at(const LinearFlockModel& m, double omega);

struct ResponsePoint
{
  double omega = 0.0;
  ComplexVector amplitudes;      ///< empty when error is set
  Eigen::VectorXd gains;         ///< |a_k|
  std::optional<std::string> error;

  bool ok() const noexcept { return !error.has_value(); }
};

struct ResponseTable
{
  std::vector<ResponsePoint> rows;
};

enum class Execution
{
  Serial,
  Parallel,
};

/// Grid must be positive and strictly increasing; per-point failures are
/// recorded in the row, not thrown.
ResponseTable sweep(const LinearFlockModel& m, std::span<const double> grid,
                    Execution exec = Execution::Parallel);

/// n log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// The default peak-search grid: [1e-4, 1e2], 2000 log-spaced points.
std::vector<double> default_grid();

/// Default grid, widened down to a tenth of the smallest companion eigenvalue
/// modulus and of slow_frequency (whichever is lower), with the imaginary
/// parts of the companion eigenvalues inserted so that sharp resonances of
/// lightly damped poles are bracketed. `points` is the count on the default
/// six decades; wider ranges keep the same density.
std::vector<double> pole_seeded_grid(const LinearFlockModel& m,
                                     std::size_t points = 2000);
std::vector<double> pole_seeded_grid(
    const std::vector<std::complex<double>>& companion_eigenvalues,
    std::size_t points = 2000, double slow_frequency = 0.0);

struct PeakGain
{
  double omega = 0.0;
  double gain = 0.0;
};

/// Grid argmax of |a_N| followed by refine_iters golden-section steps (in
/// log omega) on the bracket formed by the neighboring grid points. Grid points
/// and probes where the solve is singular are skipped.
PeakGain peak_gain(const LinearFlockModel& m, std::span<const double> grid,
                   int refine_iters = 60, Execution exec = Execution::Parallel);

} // namespace flocklab
