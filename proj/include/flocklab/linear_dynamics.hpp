#pragma once

#include "flocklab/flock_model.hpp"
#include "flocklab/leader_program.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace flocklab {

/// Follower/leader partition of the Laplacians. Rows and columns of the
/// ff blocks follow `followers` (ascending); fl columns follow `leaders`.
struct FollowerBlocks
{
  std::vector<int> followers;
  std::vector<int> leaders;
  Matrix ff_rho;
  Matrix ff_r;
  Matrix fl_rho;
  Matrix fl_r;
};

FollowerBlocks follower_reduction(const LinearFlockModel& m);

/// First-order form on (z_f, z_f'):  [[0, I], [f Lff_rho, g Lff_r]].
Matrix companion_matrix(const LinearFlockModel& m);

struct StopRule
{
  enum class Kind
  {
    Horizon,       ///< run to the horizon
    EnergySettled, ///< see integrate()
  };
  Kind kind = Kind::Horizon;
  double energy_ratio = 1e-6;
  double quiet_fraction = 0.1;
  int check_every = 16; ///< steps between energy evaluations
};

struct IntegrateOptions
{
  double dt = 0.01;
  double horizon = 100.0;
  StopRule stop{};
  std::size_t max_samples = 100000;
  bool record_states = true;
};

struct Trajectory
{
  std::vector<double> times;
  std::vector<FlockState> states;
  double max_abs_zN = 0.0;    ///< running max of |z_N|, every step
  double max_abs_z_any = 0.0; ///< over agents, every step
  double argmax_zN = 0.0;     ///< time at which max_abs_zN was attained
  double end_time = 0.0;
  std::size_t steps = 0;
  std::size_t stride = 1; ///< recorded every stride-th step (plus the last)
  bool stopped_early = false;
  std::vector<std::string> warnings;
};

/// Fixed-step classical RK4 on the follower equations; leaders follow
/// `program` (or coast when absent). Recording is thinned to at most
/// max_samples states; the maxima always use every step.
///
/// With StopRule::EnergySettled integration ends once |E| <= energy_ratio *
/// peak |E| and max |z_N| has not grown during the trailing quiet_fraction of
/// the elapsed time, where E is the mechanical energy of the work-energy
/// identity. Throws BlowUpError when the state becomes non-finite.
Trajectory integrate(const LinearFlockModel& m, const FlockState& init,
                     const LeaderProgram& program,
                     const IntegrateOptions& opts);

/// Leader step of velocity v_leader, observed in the leader frame: leaders
/// pinned at 0 and followers starting at z = 0, z' = -v_leader. This is the
/// standard initial data scaled by v_leader / 0.1.
Trajectory step_response(const LinearFlockModel& m, double v_leader,
                         const IntegrateOptions& opts);

/// Defaults for step_response: dt = 0.01, horizon cap 1e6, energy stop rule.
IntegrateOptions impulse_defaults();

/// Upper bound used for the dt stability check (infinity norm, refined by an
/// eigensolve when the bound is not conclusive).
double companion_spectral_radius(const LinearFlockModel& m);

/// Kinetic-plus-potential part of the work-energy identity:
/// 1/2 [ (z', z') - f (L_rho^S z, z) ].
double mechanical_energy(const LinearFlockModel& m, const Vector& z,
                         const Vector& zdot);

} // namespace flocklab
