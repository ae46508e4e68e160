#pragma once

#include "flocklab/flock_model.hpp"

#include <complex>
#include <vector>

namespace flocklab {

using Complex = std::complex<double>;

/// All eigenvalues of a dense real matrix (Hessenberg reduction + shifted
/// QR). Sorted by real part, then imaginary part. Throws ConvergenceError.
std::vector<Complex> eigenvalues(const Matrix& M);

struct ConditionedEigenvalue
{
  Complex value;
  double condition = 1.0;   ///< |x| |y| / |y^H x| on the balanced matrix
  double uncertainty = 0.0; ///< condition * eps * |balanced matrix|_F
};

/// Eigenvalues with first-order perturbation bounds. Same ordering as
/// eigenvalues(). Costs an eigenvector solve plus an inverse.
std::vector<ConditionedEigenvalue> conditioned_eigenvalues(const Matrix& M);

struct SpectrumReport
{
  std::vector<Complex> eigenvalues;
  double spectral_abscissa = 0.0; ///< max Re
  double min_abs_real = 0.0;      ///< min |Re|
  double min_modulus = 0.0;       ///< min |lambda|
  double spectral_radius = 0.0;   ///< max |lambda|
  double near_zero_threshold = 0.0;
  int near_zero_count = 0; ///< |lambda| < near_zero_threshold
};

SpectrumReport spectral_summary(std::vector<Complex> eigs,
                                double near_zero_threshold = 1e-6);

/// Largest distance between an eigenvalue with nonzero imaginary part and
/// the nearest conjugate of another listed eigenvalue.
double conjugate_pairing_defect(const std::vector<Complex>& eigs);

} // namespace flocklab
