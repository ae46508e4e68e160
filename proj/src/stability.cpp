#include "flocklab/stability.hpp"

#include "flocklab/errors.hpp"
#include "flocklab/kernels.hpp"
#include "flocklab/spectrum.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace flocklab {

FlockFamily standard_family(double rho, double r, double f, double g,
                            std::vector<int> N_list)
{
  // validate the parameters once, up front, with a 1-follower model
  build_standard_example({1, rho, r, f, g});
  FlockFamily fam;
  fam.make = [=](int N) {
    return build_standard_example({N, rho, r, f, g});
  };
  fam.N_list = std::move(N_list);
  return fam;
}

namespace {

struct LeastSquares
{
  Vector coef;
  double rms;
};

LeastSquares least_squares(const Matrix& X, const Vector& y)
{
  const Eigen::ColPivHouseholderQR<Matrix> qr(X);
  LeastSquares out;
  out.coef = qr.solve(y);
  out.rms = std::sqrt((X * out.coef - y).squaredNorm() /
                      static_cast<double>(y.size()));
  return out;
}

void check_N_list(const std::vector<int>& N_list)
{
  if (N_list.size() < 3)
    throw Error("N_list needs at least 3 entries for the regression");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1)
      throw Error(fmt::format("N_list[{}] = {} is not positive", i, N_list[i]));
    if (i > 0 && N_list[i] <= N_list[i - 1])
      throw Error("N_list must be strictly increasing");
  }
}

std::vector<Complex> stabilized_spectrum(const LinearFlockModel& m, int N)
{
  const Matrix C = companion_matrix(m);
  const auto eigs = eigenvalues(C);
  if (eigs.empty())
    return eigs;
  const SpectrumReport rep = spectral_summary(eigs);
  const double tol = 1e-9 * std::max(1.0, rep.spectral_radius);
  if (rep.spectral_abscissa <= tol)
    return eigs;
  // Near the imaginary axis the nonnormal companion matrices resolve
  // eigenvalues only to kappa * eps * |C|. A member is rejected only when some
  // eigenvalue lies to the right of the axis by more than that.
  for (const auto& e : conditioned_eigenvalues(C))
    if (e.value.real() > std::max(tol, 10.0 * e.uncertainty))
      throw FamilyError(N, fmt::format("member N = {} is not stabilized "
                                       "(eigenvalue {:.3g}{:+.3g}i, "
                                       "uncertainty {:.3g})",
                                       N, e.value.real(), e.value.imag(),
                                       e.uncertainty));
  return eigs;
}

template <class F>
std::vector<double> per_member(const FlockFamily& fam, Execution exec, F&& fn)
{
  return exec == Execution::Parallel ? kernels::parallel::map(fam.N_list, fn)
                                     : kernels::serial::map(fam.N_list, fn);
}

} // namespace

ExponentEstimate fit_exponent(const std::vector<int>& N_list,
                              std::vector<double> values)
{
  check_N_list(N_list);
  if (values.size() != N_list.size())
    throw Error("fit_exponent: one value per N is required");
  for (double v : values)
    if (!std::isfinite(v))
      throw NumericError("fit_exponent: non-finite log maximum");

  const auto n = static_cast<Eigen::Index>(N_list.size());
  Matrix X(n, 3);
  Matrix X1(n, 2);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double N = N_list[static_cast<std::size_t>(i)];
    X(i, 0) = N;
    X(i, 1) = std::log(N);
    X(i, 2) = 1.0;
    X1(i, 0) = N;
    X1(i, 1) = 1.0;
    y(i) = values[static_cast<std::size_t>(i)];
  }

  ExponentEstimate est;
  est.N_list = N_list;
  const LeastSquares full = least_squares(X, y);
  est.slope = full.coef(0);
  est.log_coefficient = full.coef(1);
  est.intercept = full.coef(2);
  est.residual = full.rms;
  const LeastSquares line = least_squares(X1, y);
  est.linear_slope = line.coef(0);
  est.linear_intercept = line.coef(1);
  est.per_N_values = std::move(values);
  return est;
}

ImpulseOptions classifier_impulse_defaults()
{
  ImpulseOptions o;
  o.integrate.dt = 0.05;
  o.integrate.record_states = false;
  return o;
}

void require_stabilized(const LinearFlockModel& m, int N)
{
  stabilized_spectrum(m, N);
}

ExponentEstimate harmonic_exponent(const FlockFamily& fam,
                                   const HarmonicOptions& opts)
{
  check_N_list(fam.N_list);
  const auto values = per_member(fam, opts.exec, [&](int N) {
    const LinearFlockModel m = fam.make(N);
    const auto grid = pole_seeded_grid(stabilized_spectrum(m, N), opts.grid_points,
                                       ResponseSolver(m).slow_frequency());
    return std::log(peak_gain(m, grid, opts.refine_iters, Execution::Serial).gain);
  });
  return fit_exponent(fam.N_list, values);
}

ExponentEstimate impulse_exponent(const FlockFamily& fam, double v_leader,
                                  const ImpulseOptions& opts)
{
  check_N_list(fam.N_list);
  IntegrateOptions iopts = opts.integrate;
  iopts.record_states = false;

  const auto maxima = per_member(fam, opts.exec, [&](int N) {
    const LinearFlockModel m = fam.make(N);
    require_stabilized(m, N);
    try {
      return step_response(m, v_leader, iopts).max_abs_zN;
    }
    catch (const BlowUpError& e) {
      throw FamilyError(N, fmt::format("member N = {} blew up at t = {}: {}",
                                       N, e.time(), e.what()));
    }
  });

  if (std::all_of(maxima.begin(), maxima.end(),
                  [](double v) { return v == 0.0; })) {
    ExponentEstimate zero;
    zero.N_list = fam.N_list;
    zero.per_N_values.assign(maxima.size(),
                             -std::numeric_limits<double>::infinity());
    zero.intercept = -std::numeric_limits<double>::infinity();
    zero.linear_intercept = zero.intercept;
    return zero;
  }

  std::vector<double> logs;
  logs.reserve(maxima.size());
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    if (!(maxima[i] > 0.0))
      throw FamilyError(fam.N_list[i],
                        fmt::format("member N = {} has zero impulse maximum",
                                    fam.N_list[i]));
    logs.push_back(std::log(maxima[i]));
  }
  return fit_exponent(fam.N_list, std::move(logs));
}

std::string to_string(Verdict v)
{
  switch (v) {
  case Verdict::FlockStable:
    return "flock-stable";
  case Verdict::HarmonicallyUnstable:
    return "harmonically-unstable";
  case Verdict::ImpulseUnstable:
    return "impulse-unstable";
  case Verdict::BothUnstable:
    return "both-unstable";
  }
  return "unknown";
}

Verdict verdict_from_slopes(double harmonic_slope, double impulse_slope,
                            double threshold)
{
  const bool harmonic = harmonic_slope > threshold;
  const bool impulse = impulse_slope > threshold;
  if (harmonic && impulse)
    return Verdict::BothUnstable;
  if (harmonic)
    return Verdict::HarmonicallyUnstable;
  if (impulse)
    return Verdict::ImpulseUnstable;
  return Verdict::FlockStable;
}

Classification classify(const FlockFamily& fam, double v_leader,
                        double slope_threshold, const HarmonicOptions& hopts,
                        const ImpulseOptions& iopts)
{
  Classification c{Verdict::FlockStable, harmonic_exponent(fam, hopts),
                   impulse_exponent(fam, v_leader, iopts), slope_threshold};
  c.verdict = verdict_from_slopes(c.harmonic.slope, c.impulse.slope,
                                  slope_threshold);
  return c;
}

ScalingFit scaling_fit(const std::vector<double>& peaks,
                       const std::vector<int>& N_list)
{
  if (peaks.size() != N_list.size() || peaks.size() < 2)
    throw Error("scaling_fit: need matching peaks and N_list (>= 2 points)");
  const auto n = static_cast<Eigen::Index>(peaks.size());
  Matrix Xe(n, 2);
  Matrix Xp(n, 2);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = peaks[static_cast<std::size_t>(i)];
    const double N = N_list[static_cast<std::size_t>(i)];
    if (!(p > 0.0))
      throw Error(fmt::format("scaling_fit: peak {} is not positive", i));
    if (!(N > 0.0))
      throw Error(fmt::format("scaling_fit: N[{}] is not positive", i));
    Xe(i, 0) = N;
    Xe(i, 1) = 1.0;
    Xp(i, 0) = std::log(N);
    Xp(i, 1) = 1.0;
    y(i) = std::log(p);
  }
  const LeastSquares e = least_squares(Xe, y);
  const LeastSquares p = least_squares(Xp, y);
  ScalingFit fit;
  fit.exp_rate = e.coef(0);
  fit.exp_intercept = e.coef(1);
  fit.exp_residual = e.rms;
  fit.power_exponent = p.coef(0);
  fit.power_intercept = p.coef(1);
  fit.power_residual = p.rms;
  fit.preferred = e.rms < p.rms ? ScalingLaw::Exponential : ScalingLaw::Power;
  return fit;
}

} // namespace flocklab
