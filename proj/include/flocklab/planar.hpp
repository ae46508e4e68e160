#pragma once

// Orientable flocks in the plane. Each follower rotates the formation
// offsets by its own heading (the direction of its velocity):
//
//   m_k x_k'' = f sum_i L_rho[k,i] (x_i - R(theta_k) h_i)
//             + g sum_i L_r[k,i] x_i'
//             + alpha (1 - V / |x_k'|) x_k'
//
// The heading is undefined at zero speed; see HeadingPolicy.

#include "flocklab/flock_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <variant>
#include <vector>

namespace flocklab {

using Vec2 = Eigen::Vector2d;

enum class HeadingPolicy
{
  Error,         ///< throw SingularityError below epsilon_v
  FreezeHeading, ///< reuse the last heading seen above epsilon_v
};

struct PlanarOptions
{
  std::vector<double> masses; ///< empty: all ones
  double alpha = 0.0;         ///< cruise gain, <= 0
  double cruise_speed = 0.0;  ///< V, >= 0
  double epsilon_v = 1e-6;    ///< speed guard for the heading
  HeadingPolicy policy = HeadingPolicy::Error;
};

class PlanarFlockModel
{
public:
  /// Throws ModelError on non-positive masses, alpha > 0, epsilon_v <= 0, or
  /// size mismatches. Leader offsets only matter for display and metrics.
  PlanarFlockModel(LinearFlockModel base, std::vector<Vec2> formation,
                   PlanarOptions opts = {});

  const LinearFlockModel& base() const noexcept { return base_; }
  int agent_count() const noexcept { return base_.agent_count(); }
  const std::vector<Vec2>& formation() const noexcept { return formation_; }
  const std::vector<double>& masses() const noexcept { return masses_; }
  double alpha() const noexcept { return alpha_; }
  double cruise_speed() const noexcept { return cruise_speed_; }
  double epsilon_v() const noexcept { return epsilon_v_; }
  HeadingPolicy policy() const noexcept { return policy_; }

  /// sum_i L_rho[k,i] h_i, cached.
  const std::vector<Vec2>& laplacian_offsets() const noexcept { return Lh_; }

private:
  LinearFlockModel base_;
  std::vector<Vec2> formation_;
  std::vector<double> masses_;
  double alpha_;
  double cruise_speed_;
  double epsilon_v_;
  HeadingPolicy policy_;
  std::vector<Vec2> Lh_;
};

struct PlanarState
{
  double t = 0.0;
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
};

Eigen::Matrix2d rotation(double theta);

/// Angle of v from the positive x-axis, in (-pi, pi]. Throws
/// SingularityError when |v| < epsilon_v.
double heading(const Vec2& v, double epsilon_v);

/// Accelerations of all agents; leader entries are zero (leaders follow their
/// program). `frozen_headings`, when given, supplies the fallback heading for
/// agents below the speed guard under HeadingPolicy::FreezeHeading.
std::vector<Vec2> planar_accel(const PlanarState& s, const PlanarFlockModel& m,
                               const std::vector<double>* frozen_headings = nullptr);

/// Straight line: p(t) = origin + velocity * t.
struct StraightLine
{
  Vec2 origin = Vec2::Zero();
  Vec2 velocity = Vec2(1.0, 0.0);
};

/// Constant speed with the heading ramped linearly from heading0 to
/// heading0 + turn over [start, start + duration]: a circular arc between two
/// straight legs. p(0) = origin.
struct HeadingRamp
{
  Vec2 origin = Vec2::Zero();
  double speed = 1.0;
  double heading0 = 0.0;
  double turn = 0.0;
  double start = 0.0;
  double duration = 1.0;
};

/// C1 cubic Hermite through waypoints (Catmull-Rom tangents), linear
/// extrapolation outside the knot range.
struct WaypointSpline
{
  std::vector<double> times;
  std::vector<Vec2> points;
};

using PlanarLeaderSignal = std::variant<StraightLine, HeadingRamp, WaypointSpline>;
using PlanarLeaderProgram = std::map<int, PlanarLeaderSignal>;

struct PlanarSample
{
  Vec2 position;
  Vec2 velocity;
};

PlanarSample sample(const PlanarLeaderSignal& signal, double t);

struct PlanarIntegrateOptions
{
  double dt = 0.01;
  double horizon = 100.0;
  std::size_t max_samples = 20000;
  std::vector<double> snapshot_times; ///< states kept for space plots
};

struct PlanarTrajectory
{
  std::vector<double> times;
  std::vector<PlanarState> states;
  std::vector<PlanarState> snapshots; ///< one per reached snapshot time
  PlanarState final_state;
  std::size_t stride = 1;
};

/// Classical RK4. Leaders missing from the program coast at their initial
/// velocity. Throws SingularityError (with time and agent) or BlowUpError.
PlanarTrajectory integrate_planar(const PlanarFlockModel& m,
                                  const PlanarState& init,
                                  const PlanarLeaderProgram& program,
                                  const PlanarIntegrateOptions& opts);

/// RMS over agents of |(x_k - mean x) - R(mean heading)(h_k - mean h)|.
/// The mean heading is that of the mean velocity.
double formation_error(const PlanarState& s, const PlanarFlockModel& m);

/// Positions R(heading) h_k, all velocities speed * (cos, sin)(heading).
PlanarState equilibrium_state(const PlanarFlockModel& m, double heading,
                              double speed);

/// Uniform on [1 - spread, 1 + spread], deterministic for a given seed.
std::vector<double> sample_masses(int agents, double spread, std::uint64_t seed);

/// Seven agents: a hexagon with a center, body frame x pointing forward.
/// Agent 0 is the front vertex and the only leader; vertices couple to their
/// two ring neighbors and the center, the center to every vertex, all rows
/// normalized to unit weight sum.
struct Formation
{
  std::vector<Vec2> offsets;
  NeighborWeights weights;
  std::vector<int> leaders;
};

Formation christmas_tree_formation(double spacing = 1.0);

struct TurnOptions
{
  double speed = 1.0;
  double turn = 1.5707963267948966; ///< 90 degrees
  double ramp = 200.0;
  double settle = 200.0; ///< straight flight after the turn
  double f = -1.0;
  double g = -2.0;
  double dt = 0.01;
  PlanarOptions planar{};
};

struct TurnScenario
{
  PlanarFlockModel model;
  PlanarState init;
  PlanarLeaderProgram program;
  PlanarIntegrateOptions integrate;
};

/// Formation in equilibrium heading along +x, then the leader turns by
/// `turn` over `ramp` time units starting at t = 0.
TurnScenario turn_maneuver(const TurnOptions& opts = {});

/// Heading of the mean velocity of all agents.
double mean_heading(const PlanarState& s, double epsilon_v);

} // namespace flocklab
