#include "flocklab/spectrum.hpp"

#include "flocklab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace flocklab {

namespace {

// Parlett-Reinsch balancing: a diagonal similarity by powers of two that
// equalizes row and column norms. Leaves the spectrum unchanged and keeps the
// QR iteration accurate on the strongly nonnormal companion matrices.
Matrix balance(Matrix A)
{
  const auto n = A.rows();
  constexpr double radix = 2.0;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i)
          continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0)
        continue;
      const double s = c + r;
      double scale = 1.0;
      double g = r / radix;
      while (c < g) {
        scale *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        scale /= radix;
        c /= radix * radix;
      }
      if ((c + r) / scale < 0.95 * s) {
        converged = false;
        A.row(i) /= scale;
        A.col(i) *= scale;
      }
    }
  }
  return A;
}

} // namespace

std::vector<Complex> eigenvalues(const Matrix& M)
{
  if (M.rows() != M.cols())
    throw Error("eigenvalues: matrix must be square");
  if (M.size() == 0)
    return {};
  if (!M.allFinite())
    throw NumericError("eigenvalues: matrix has non-finite entries");

  Eigen::EigenSolver<Matrix> solver(balance(M), /*computeEigenvectors=*/false);
  std::vector<Complex> out(solver.eigenvalues().data(),
                           solver.eigenvalues().data() +
                               solver.eigenvalues().size());
  if (solver.info() != Eigen::Success)
    throw ConvergenceError(
        fmt::format("eigenvalues: QR iteration did not converge ({}x{})",
                    M.rows(), M.cols()),
        std::move(out));

  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

std::vector<ConditionedEigenvalue> conditioned_eigenvalues(const Matrix& M)
{
  if (M.rows() != M.cols())
    throw Error("conditioned_eigenvalues: matrix must be square");
  if (M.size() == 0)
    return {};
  if (!M.allFinite())
    throw NumericError("conditioned_eigenvalues: matrix has non-finite entries");

  const Matrix B = balance(M);
  Eigen::EigenSolver<Matrix> solver(B, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError(
        fmt::format("conditioned_eigenvalues: QR iteration did not converge ({}x{})",
                    M.rows(), M.cols()),
        {});

  // kappa_i = |x_i| |y_i| / |y_i^H x_i|; with W = V^{-1} the rows of W are
  // left eigenvectors normalized so that y_i^H x_i = 1.
  const Eigen::MatrixXcd V = solver.eigenvectors();
  const Eigen::MatrixXcd W = V.fullPivLu().inverse();
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = B.norm();
  std::vector<ConditionedEigenvalue> out(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    double kappa = V.col(i).norm() * W.row(i).norm();
    if (!std::isfinite(kappa))
      kappa = std::numeric_limits<double>::infinity();
    out[static_cast<std::size_t>(i)] = {solver.eigenvalues()(i), kappa,
                                        kappa * eps * scale};
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.value.real() != b.value.real() ? a.value.real() < b.value.real()
                                            : a.value.imag() < b.value.imag();
  });
  return out;
}

SpectrumReport spectral_summary(std::vector<Complex> eigs,
                                double near_zero_threshold)
{
  if (eigs.empty())
    throw Error("spectral_summary: empty eigenvalue list");

  SpectrumReport rep;
  rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
  rep.min_abs_real = std::numeric_limits<double>::infinity();
  rep.min_modulus = std::numeric_limits<double>::infinity();
  rep.near_zero_threshold = near_zero_threshold;
  for (const Complex& l : eigs) {
    rep.spectral_abscissa = std::max(rep.spectral_abscissa, l.real());
    rep.min_abs_real = std::min(rep.min_abs_real, std::abs(l.real()));
    rep.min_modulus = std::min(rep.min_modulus, std::abs(l));
    rep.spectral_radius = std::max(rep.spectral_radius, std::abs(l));
    if (std::abs(l) < near_zero_threshold)
      ++rep.near_zero_count;
  }
  rep.eigenvalues = std::move(eigs);
  return rep;
}

double conjugate_pairing_defect(const std::vector<Complex>& eigs)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    if (eigs[i].imag() == 0.0)
      continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < eigs.size(); ++j)
      if (j != i)
        best = std::min(best, std::abs(eigs[j] - std::conj(eigs[i])));
    worst = std::max(worst, best);
  }
  return worst;
}

} // namespace flocklab
