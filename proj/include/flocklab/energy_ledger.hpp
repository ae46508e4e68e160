#pragma once

// Work-energy bookkeeping for linear flocks with arbitrary Laplacians:
//
//   1/2 [ (z',z')(t) - f (L_rho^S z, z)(t) ]
//     = 1/2 [ (z',z')(0) - f (L_rho^S z, z)(0) ]
//       + g int_0^t (L_r^S z', z') + f int_0^t (L_rho^A z, z')
//
// holds along every solution of the unforced full-vector system (leader rows
// zero, leaders moving with constant velocity).

#include "flocklab/flock_model.hpp"
#include "flocklab/linear_dynamics.hpp"

#include <vector>

namespace flocklab {

struct SymmetricSplit
{
  Matrix symmetric;     ///< (L + L^T) / 2
  Matrix antisymmetric; ///< (L - L^T) / 2
};

SymmetricSplit split(const Matrix& L);

struct LedgerSeries
{
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> residual;

  /// max |residual| / max |lhs| (0 when lhs vanishes identically).
  double relative_residual() const;
};

/// Integrals by the trapezoid rule on the recorded samples. Throws
/// ModelError when state sizes do not match the model.
LedgerSeries ledger(const Trajectory& traj, const LinearFlockModel& m);

/// Ascending eigenvalues of a symmetric matrix (tridiagonalization + QL).
/// Throws Error when L_S is asymmetric beyond 1e-12.
std::vector<double> symmetric_spectrum(const Matrix& L_S);

} // namespace flocklab
