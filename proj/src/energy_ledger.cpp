#include "flocklab/energy_ledger.hpp"

#include "flocklab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace flocklab {

SymmetricSplit split(const Matrix& L)
{
  if (L.rows() != L.cols())
    throw Error("split: matrix must be square");
  const Matrix Lt = L.transpose();
  return {0.5 * (L + Lt), 0.5 * (L - Lt)};
}

double LedgerSeries::relative_residual() const
{
  double res = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    res = std::max(res, std::abs(residual[i]));
    scale = std::max(scale, std::abs(lhs[i]));
  }
  return scale > 0.0 ? res / scale : res;
}

LedgerSeries ledger(const Trajectory& traj, const LinearFlockModel& m)
{
  const auto n = m.agent_count();
  if (traj.states.size() != traj.times.size())
    throw ModelError("trajectory", "times and states are misaligned");

  const SymmetricSplit rho = split(m.L_rho());
  const Matrix Lr_sym = split(m.L_r()).symmetric;
  const double f = m.f();
  const double g = m.g();

  LedgerSeries out;
  const std::size_t samples = traj.states.size();
  out.times = traj.times;
  out.lhs.resize(samples);
  out.rhs.resize(samples);
  out.residual.resize(samples);
  if (samples == 0)
    return out;

  std::vector<double> damping(samples);  // (L_r^S z', z')
  std::vector<double> transfer(samples); // (L_rho^A z, z')
  for (std::size_t s = 0; s < samples; ++s) {
    const FlockState& st = traj.states[s];
    if (st.z.size() != n || st.zdot.size() != n)
      throw ModelError("trajectory",
                       fmt::format("sample {} has {} agents, model has {}", s,
                                   st.z.size(), n));
    out.lhs[s] = 0.5 * (st.zdot.squaredNorm() - f * st.z.dot(rho.symmetric * st.z));
    damping[s] = st.zdot.dot(Lr_sym * st.zdot);
    transfer[s] = st.zdot.dot(rho.antisymmetric * st.z);
  }

  double work_g = 0.0;
  double work_f = 0.0;
  out.rhs[0] = out.lhs[0];
  for (std::size_t s = 1; s < samples; ++s) {
    const double h = traj.times[s] - traj.times[s - 1];
    work_g += 0.5 * h * (damping[s] + damping[s - 1]);
    work_f += 0.5 * h * (transfer[s] + transfer[s - 1]);
    out.rhs[s] = out.lhs[0] + g * work_g + f * work_f;
  }
  for (std::size_t s = 0; s < samples; ++s)
    out.residual[s] = out.lhs[s] - out.rhs[s];
  return out;
}

std::vector<double> symmetric_spectrum(const Matrix& L_S)
{
  if (L_S.rows() != L_S.cols())
    throw Error("symmetric_spectrum: matrix must be square");
  if (L_S.size() == 0)
    return {};
  const double asym = (L_S - L_S.transpose()).cwiseAbs().maxCoeff();
  if (asym > kStructuralTolerance)
    throw Error(fmt::format("symmetric_spectrum: matrix is not symmetric "
                            "(max |A - A^T| = {:.3g})",
                            asym));
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(L_S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("symmetric_spectrum: QL iteration did not converge");
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace flocklab
