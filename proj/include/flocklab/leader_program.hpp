#pragma once

#include <map>
#include <variant>
#include <vector>

namespace flocklab {

struct LeaderSample
{
  double position;
  double velocity;
};

/// x(t) = position0 + velocity * t. With velocity 0 the leader is pinned.
struct ConstantVelocity
{
  double position0 = 0.0;
  double velocity = 0.0;
};

/// x(t) = offset + amplitude * sin(omega t + phase).
struct Sinusoid
{
  double amplitude = 1.0;
  double omega = 1.0;
  double phase = 0.0;
  double offset = 0.0;
};

/// Linear interpolation between knots, constant beyond the ends. Velocity is
/// the slope of the active segment (right-continuous at knots).
struct PiecewiseLinear
{
  std::vector<double> times;
  std::vector<double> positions;
};

using LeaderSignal = std::variant<ConstantVelocity, Sinusoid, PiecewiseLinear>;

/// Leader index -> prescribed motion. Leaders missing from the map coast at
/// their initial velocity (z'' = 0).
using LeaderProgram = std::map<int, LeaderSignal>;

LeaderSample sample(const LeaderSignal& signal, double t);

/// Throws ModelError for unsorted or mismatched knots.
void check_signal(const LeaderSignal& signal);

} // namespace flocklab
