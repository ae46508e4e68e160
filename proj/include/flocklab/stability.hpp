#pragma once

#include "flocklab/flock_model.hpp"
#include "flocklab/frequency_response.hpp"
#include "flocklab/linear_dynamics.hpp"

#include <functional>
#include <string>
#include <vector>

namespace flocklab {

/// Models indexed by follower count N.
struct FlockFamily
{
  std::function<LinearFlockModel(int)> make;
  std::vector<int> N_list;
};

/// Standard example with fixed (rho, r, f, g); N taken from N_list.
FlockFamily standard_family(double rho, double r, double f, double g,
                            std::vector<int> N_list = {25, 50, 100});

/// Growth-rate estimate for per-N log maxima y_N.
///
/// The fit is y = slope * N + log_coefficient * ln N + intercept in the least
/// squares sense. Finite flocks that are stable in the asymptotic sense still
/// show polynomial growth of their maxima (linear in N at rho = 1/2), which a
/// plain line through (N, y) reports as a spurious exponential rate; the ln N
/// column absorbs it. On data that is exactly linear in N the fit reduces to
/// the ordinary regression line. linear_slope keeps the plain regression.
struct ExponentEstimate
{
  std::vector<int> N_list;
  std::vector<double> per_N_values;
  double slope = 0.0;
  double log_coefficient = 0.0;
  double intercept = 0.0;
  double residual = 0.0; ///< RMS of the fit
  double linear_slope = 0.0;
  double linear_intercept = 0.0;
};

/// Needs at least 3 strictly increasing N.
ExponentEstimate fit_exponent(const std::vector<int>& N_list,
                              std::vector<double> values);

struct HarmonicOptions
{
  std::size_t grid_points = 2000;
  int refine_iters = 60;
  Execution exec = Execution::Parallel;
};

struct ImpulseOptions
{
  IntegrateOptions integrate = impulse_defaults();
  Execution exec = Execution::Parallel;
};

/// Classifier defaults: dt = 0.05 for the impulse runs (see README).
ImpulseOptions classifier_impulse_defaults();

/// Throws FamilyError if the model has a companion eigenvalue with
/// Re > max(1e-9 * max(1, spectral radius), 10 * its perturbation bound).
void require_stabilized(const LinearFlockModel& m, int N);

/// ln max_omega |a_N(omega)| per member, searched on pole_seeded_grid().
ExponentEstimate harmonic_exponent(const FlockFamily& fam,
                                   const HarmonicOptions& opts = {});

/// ln max_t |z_N(t)| per member under step_response(v_leader). v_leader = 0
/// gives all-zero maxima and a zero slope by convention.
ExponentEstimate impulse_exponent(const FlockFamily& fam, double v_leader,
                                  const ImpulseOptions& opts =
                                      classifier_impulse_defaults());

enum class Verdict
{
  FlockStable,
  HarmonicallyUnstable,
  ImpulseUnstable,
  BothUnstable,
};

std::string to_string(Verdict v);

struct Classification
{
  Verdict verdict;
  ExponentEstimate harmonic;
  ExponentEstimate impulse;
  double slope_threshold;
};

Classification classify(const FlockFamily& fam, double v_leader = 0.1,
                        double slope_threshold = 0.01,
                        const HarmonicOptions& hopts = {},
                        const ImpulseOptions& iopts =
                            classifier_impulse_defaults());

Verdict verdict_from_slopes(double harmonic_slope, double impulse_slope,
                            double threshold);

enum class ScalingLaw
{
  Exponential,
  Power,
};

struct ScalingFit
{
  double exp_rate = 0.0; ///< ln peak ~ exp_rate * N + exp_intercept
  double exp_intercept = 0.0;
  double exp_residual = 0.0;
  double power_exponent = 0.0; ///< ln peak ~ power_exponent * ln N + power_intercept
  double power_intercept = 0.0;
  double power_residual = 0.0;
  ScalingLaw preferred = ScalingLaw::Exponential;
};

/// Both fits by least squares on ln(peak); the smaller RMS residual wins
/// (ties go to the power law).
ScalingFit scaling_fit(const std::vector<double>& peaks,
                       const std::vector<int>& N_list);

} // namespace flocklab
