#include "flocklab/planar.hpp"

#include "flocklab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace flocklab {

PlanarFlockModel::PlanarFlockModel(LinearFlockModel base,
                                   std::vector<Vec2> formation,
                                   PlanarOptions opts)
    : base_(std::move(base)),
      formation_(std::move(formation)),
      masses_(std::move(opts.masses)),
      alpha_(opts.alpha),
      cruise_speed_(opts.cruise_speed),
      epsilon_v_(opts.epsilon_v),
      policy_(opts.policy)
{
  const auto n = static_cast<std::size_t>(base_.agent_count());
  if (formation_.size() != n)
    throw ModelError("formation", fmt::format("expected {} offsets, got {}", n,
                                              formation_.size()));
  if (masses_.empty())
    masses_.assign(n, 1.0);
  if (masses_.size() != n)
    throw ModelError("masses", fmt::format("expected {} masses, got {}", n,
                                           masses_.size()));
  for (std::size_t k = 0; k < n; ++k)
    if (!(masses_[k] > 0.0) || !std::isfinite(masses_[k]))
      throw ModelError("masses", fmt::format("mass of agent {} must be positive", k));
  if (!(alpha_ <= 0.0))
    throw ModelError("alpha", fmt::format("cruise gain must be <= 0, got {}", alpha_));
  if (!(cruise_speed_ >= 0.0))
    throw ModelError("V", fmt::format("cruise speed must be >= 0, got {}",
                                      cruise_speed_));
  if (!(epsilon_v_ > 0.0))
    throw ModelError("epsilon_v", "speed guard must be positive");

  Lh_.assign(n, Vec2::Zero());
  const Matrix& L = base_.L_rho();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      Lh_[k] += L(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) *
                formation_[i];
}

Eigen::Matrix2d rotation(double theta)
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  return R;
}

double heading(const Vec2& v, double epsilon_v)
{
  if (!(v.norm() >= epsilon_v))
    throw SingularityError(-1, std::nan(""),
                           fmt::format("heading undefined: speed {:.3g} below "
                                       "guard {:.3g}",
                                       v.norm(), epsilon_v));
  const double theta = std::atan2(v.y(), v.x());
  return theta <= -std::numbers::pi ? std::numbers::pi : theta;
}

namespace {

// Heading of follower k, honoring the freeze policy. Second member is the
// unit direction used by the cruise term.
struct AgentHeading
{
  double theta;
  Vec2 direction;
};

AgentHeading agent_heading(const PlanarState& s, const PlanarFlockModel& m,
                           int k, const std::vector<double>* frozen)
{
  const Vec2& v = s.velocities[static_cast<std::size_t>(k)];
  const double speed = v.norm();
  if (speed >= m.epsilon_v()) {
    const double theta = heading(v, m.epsilon_v());
    return {theta, v / speed};
  }
  if (m.policy() == HeadingPolicy::FreezeHeading && frozen != nullptr) {
    const double theta = (*frozen)[static_cast<std::size_t>(k)];
    return {theta, Vec2(std::cos(theta), std::sin(theta))};
  }
  throw SingularityError(k, s.t,
                         fmt::format("agent {} speed {:.3g} below guard at t = {}",
                                     k, speed, s.t));
}

} // namespace

std::vector<Vec2> planar_accel(const PlanarState& s, const PlanarFlockModel& m,
                               const std::vector<double>* frozen_headings)
{
  const auto n = static_cast<std::size_t>(m.agent_count());
  if (s.positions.size() != n || s.velocities.size() != n)
    throw ModelError("state", fmt::format("expected {} agents", n));

  const LinearFlockModel& base = m.base();
  const Matrix& Lp = base.L_rho();
  const Matrix& Lv = base.L_r();
  std::vector<Vec2> acc(n, Vec2::Zero());
  for (int k : base.followers()) {
    const AgentHeading h = agent_heading(s, m, k, frozen_headings);
    Vec2 pos_term = Vec2::Zero();
    Vec2 vel_term = Vec2::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double lp = Lp(k, static_cast<Eigen::Index>(i));
      const double lv = Lv(k, static_cast<Eigen::Index>(i));
      if (lp != 0.0)
        pos_term += lp * s.positions[i];
      if (lv != 0.0)
        vel_term += lv * s.velocities[i];
    }
    const auto ku = static_cast<std::size_t>(k);
    pos_term -= rotation(h.theta) * m.laplacian_offsets()[ku];

    Vec2 force = base.f() * pos_term + base.g() * vel_term;
    if (m.alpha() != 0.0) {
      // alpha (1 - V/|v|) v == alpha (v - V v/|v|)
      force += m.alpha() * (s.velocities[ku] - m.cruise_speed() * h.direction);
    }
    acc[ku] = force / m.masses()[ku];
  }
  return acc;
}

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Vec2 unit(double theta)
{
  return {std::cos(theta), std::sin(theta)};
}

PlanarSample sample_ramp(const HeadingRamp& r, double t)
{
  const double end = r.start + r.duration;
  const Vec2 p_start = r.origin + r.speed * r.start * unit(r.heading0);
  if (t <= r.start || r.turn == 0.0) {
    return {r.origin + r.speed * t * unit(r.heading0),
            r.speed * unit(r.heading0)};
  }
  const double rate = r.turn / r.duration;
  const double radius = r.speed / rate; // signed
  auto arc = [&](double theta) {
    return Vec2(p_start.x() + radius * (std::sin(theta) - std::sin(r.heading0)),
                p_start.y() - radius * (std::cos(theta) - std::cos(r.heading0)));
  };
  if (t < end) {
    const double theta = r.heading0 + rate * (t - r.start);
    return {arc(theta), r.speed * unit(theta)};
  }
  const double theta_end = r.heading0 + r.turn;
  return {arc(theta_end) + r.speed * (t - end) * unit(theta_end),
          r.speed * unit(theta_end)};
}

std::vector<Vec2> spline_tangents(const WaypointSpline& w)
{
  const std::size_t n = w.points.size();
  std::vector<Vec2> m(n, Vec2::Zero());
  if (n < 2)
    return m;
  m.front() = (w.points[1] - w.points[0]) / (w.times[1] - w.times[0]);
  m.back() = (w.points[n - 1] - w.points[n - 2]) / (w.times[n - 1] - w.times[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    m[i] = (w.points[i + 1] - w.points[i - 1]) / (w.times[i + 1] - w.times[i - 1]);
  return m;
}

PlanarSample sample_spline(const WaypointSpline& w, double t)
{
  const auto& ts = w.times;
  const auto& ps = w.points;
  if (ts.size() != ps.size() || ts.empty())
    throw ModelError("leader_program", "waypoint spline needs matching knots");
  const std::vector<Vec2> m = spline_tangents(w);
  if (t <= ts.front())
    return {ps.front() + (t - ts.front()) * m.front(), m.front()};
  if (t >= ts.back())
    return {ps.back() + (t - ts.back()) * m.back(), m.back()};
  const auto hi = std::upper_bound(ts.begin(), ts.end(), t);
  const auto i = static_cast<std::size_t>(hi - ts.begin()) - 1;
  const double h = ts[i + 1] - ts[i];
  const double u = (t - ts[i]) / h;
  const double h00 = 2 * u * u * u - 3 * u * u + 1;
  const double h10 = u * u * u - 2 * u * u + u;
  const double h01 = -2 * u * u * u + 3 * u * u;
  const double h11 = u * u * u - u * u;
  const double d00 = (6 * u * u - 6 * u) / h;
  const double d10 = 3 * u * u - 4 * u + 1;
  const double d01 = (-6 * u * u + 6 * u) / h;
  const double d11 = 3 * u * u - 2 * u;
  return {h00 * ps[i] + h10 * h * m[i] + h01 * ps[i + 1] + h11 * h * m[i + 1],
          d00 * ps[i] + d10 * m[i] + d01 * ps[i + 1] + d11 * m[i + 1]};
}

} // namespace

PlanarSample sample(const PlanarLeaderSignal& signal, double t)
{
  return std::visit(
      overloaded{[t](const StraightLine& s) -> PlanarSample {
                   return {s.origin + t * s.velocity, s.velocity};
                 },
                 [t](const HeadingRamp& r) { return sample_ramp(r, t); },
                 [t](const WaypointSpline& w) { return sample_spline(w, t); }},
      signal);
}

namespace {

void check_finite(const PlanarState& s)
{
  for (std::size_t k = 0; k < s.positions.size(); ++k)
    if (!s.positions[k].allFinite() || !s.velocities[k].allFinite())
      throw BlowUpError(s.t, fmt::format("planar state of agent {} became "
                                         "non-finite at t = {}",
                                         k, s.t));
}

} // namespace

PlanarTrajectory integrate_planar(const PlanarFlockModel& m,
                                  const PlanarState& init,
                                  const PlanarLeaderProgram& program,
                                  const PlanarIntegrateOptions& opts)
{
  const auto n = static_cast<std::size_t>(m.agent_count());
  if (init.positions.size() != n || init.velocities.size() != n)
    throw ModelError("init", fmt::format("state must have {} agents", n));
  if (!(opts.dt > 0.0))
    throw ModelError("dt", "time step must be positive");
  if (!(opts.horizon >= 0.0) || !std::isfinite(opts.horizon))
    throw ModelError("horizon", "horizon must be nonnegative and finite");

  const auto& leaders = m.base().leaders();
  std::vector<PlanarLeaderSignal> signals;
  for (int l : leaders) {
    const auto it = program.find(l);
    if (it != program.end())
      signals.push_back(it->second);
    else
      signals.push_back(StraightLine{
          init.positions[static_cast<std::size_t>(l)] -
              init.t * init.velocities[static_cast<std::size_t>(l)],
          init.velocities[static_cast<std::size_t>(l)]});
  }

  auto place_leaders = [&](PlanarState& s) {
    for (std::size_t j = 0; j < leaders.size(); ++j) {
      const PlanarSample p = sample(signals[j], s.t);
      const auto l = static_cast<std::size_t>(leaders[j]);
      s.positions[l] = p.position;
      s.velocities[l] = p.velocity;
    }
  };

  std::vector<double> frozen(n, 0.0);
  std::vector<double>* frozen_ptr = nullptr;
  auto refresh_headings = [&](const PlanarState& s) {
    for (std::size_t k = 0; k < n; ++k)
      if (s.velocities[k].norm() >= m.epsilon_v())
        frozen[k] = heading(s.velocities[k], m.epsilon_v());
  };

  PlanarState y = init;
  place_leaders(y);
  if (m.policy() == HeadingPolicy::FreezeHeading) {
    refresh_headings(y);
    frozen_ptr = &frozen;
  }
  // no stored heading exists yet for agents that start below the guard
  for (int k : m.base().followers())
    if (m.policy() == HeadingPolicy::Error ||
        y.velocities[static_cast<std::size_t>(k)].norm() < m.epsilon_v())
      agent_heading(y, m, k, nullptr);

  const double dt = opts.dt;
  const auto total = static_cast<std::size_t>(std::ceil(opts.horizon / dt - 1e-9));
  PlanarTrajectory traj;
  traj.stride = std::max<std::size_t>(
      1, (total + opts.max_samples - 1) / std::max<std::size_t>(1, opts.max_samples));

  std::vector<double> snaps = opts.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto take_snapshots = [&](const PlanarState& s) {
    while (next_snap < snaps.size() && snaps[next_snap] <= s.t + 0.5 * dt) {
      traj.snapshots.push_back(s);
      ++next_snap;
    }
  };

  traj.times.push_back(y.t);
  traj.states.push_back(y);
  take_snapshots(y);

  // stage derivative: (x', x'') for all agents at state s
  struct Deriv
  {
    std::vector<Vec2> dx;
    std::vector<Vec2> dv;
  };
  auto derivative = [&](PlanarState& s) {
    place_leaders(s);
    Deriv d;
    d.dx = s.velocities;
    d.dv = planar_accel(s, m, frozen_ptr);
    return d;
  };
  auto advance = [&](const PlanarState& base, const Deriv& d, double h) {
    PlanarState s = base;
    s.t = base.t + h;
    for (std::size_t k = 0; k < n; ++k) {
      s.positions[k] += h * d.dx[k];
      s.velocities[k] += h * d.dv[k];
    }
    return s;
  };

  const double t0 = init.t;
  for (std::size_t step = 1; step <= total; ++step) {
    PlanarState s1 = y;
    const Deriv k1 = derivative(s1);
    PlanarState s2 = advance(y, k1, 0.5 * dt);
    const Deriv k2 = derivative(s2);
    PlanarState s3 = advance(y, k2, 0.5 * dt);
    const Deriv k3 = derivative(s3);
    PlanarState s4 = advance(y, k3, dt);
    const Deriv k4 = derivative(s4);

    for (std::size_t k = 0; k < n; ++k) {
      y.positions[k] +=
          dt / 6.0 * (k1.dx[k] + 2.0 * k2.dx[k] + 2.0 * k3.dx[k] + k4.dx[k]);
      y.velocities[k] +=
          dt / 6.0 * (k1.dv[k] + 2.0 * k2.dv[k] + 2.0 * k3.dv[k] + k4.dv[k]);
    }
    y.t = t0 + static_cast<double>(step) * dt;
    place_leaders(y);
    check_finite(y);
    if (frozen_ptr != nullptr)
      refresh_headings(y);

    if (step % traj.stride == 0 || step == total) {
      traj.times.push_back(y.t);
      traj.states.push_back(y);
    }
    take_snapshots(y);
  }
  traj.final_state = y;
  return traj;
}

double mean_heading(const PlanarState& s, double epsilon_v)
{
  Vec2 mean = Vec2::Zero();
  for (const Vec2& v : s.velocities)
    mean += v;
  mean /= static_cast<double>(s.velocities.size());
  return heading(mean, epsilon_v);
}

double formation_error(const PlanarState& s, const PlanarFlockModel& m)
{
  const auto n = static_cast<std::size_t>(m.agent_count());
  if (s.positions.size() != n || s.velocities.size() != n)
    throw ModelError("state", fmt::format("expected {} agents", n));

  const Eigen::Matrix2d R = rotation(mean_heading(s, m.epsilon_v()));
  Vec2 xbar = Vec2::Zero();
  Vec2 hbar = Vec2::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    xbar += s.positions[k];
    hbar += m.formation()[k];
  }
  xbar /= static_cast<double>(n);
  hbar /= static_cast<double>(n);

  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    sum += ((s.positions[k] - xbar) - R * (m.formation()[k] - hbar)).squaredNorm();
  return std::sqrt(sum / static_cast<double>(n));
}

PlanarState equilibrium_state(const PlanarFlockModel& m, double theta,
                              double speed)
{
  if (!(speed >= m.epsilon_v()))
    throw ModelError("speed", fmt::format("speed {} below guard {}", speed,
                                          m.epsilon_v()));
  const Eigen::Matrix2d R = rotation(theta);
  PlanarState s;
  s.t = 0.0;
  for (const Vec2& h : m.formation()) {
    s.positions.push_back(R * h);
    s.velocities.push_back(speed * unit(theta));
  }
  return s;
}

std::vector<double> sample_masses(int agents, double spread, std::uint64_t seed)
{
  if (!(spread >= 0.0 && spread < 1.0))
    throw ModelError("mass_spread", "spread must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(1.0 - spread, 1.0 + spread);
  std::vector<double> m(static_cast<std::size_t>(agents));
  for (double& x : m)
    x = spread == 0.0 ? 1.0 : dist(rng);
  return m;
}

Formation christmas_tree_formation(double spacing)
{
  Formation fm;
  // vertices 0..5 counter-clockwise from the front, center last
  for (int j = 0; j < 6; ++j) {
    const double a = j * std::numbers::pi / 3.0;
    fm.offsets.emplace_back(spacing * std::cos(a), spacing * std::sin(a));
  }
  fm.offsets.emplace_back(0.0, 0.0);
  const int center = 6;
  fm.weights.resize(7);
  for (int j = 0; j < 6; ++j) {
    const double w = 1.0 / 3.0;
    fm.weights[static_cast<std::size_t>(j)] = {
        {(j + 1) % 6, w}, {(j + 5) % 6, w}, {center, w}};
  }
  for (int j = 0; j < 6; ++j)
    fm.weights[center].push_back({j, 1.0 / 6.0});
  fm.leaders = {0};
  return fm;
}

TurnScenario turn_maneuver(const TurnOptions& opts)
{
  const Formation fm = christmas_tree_formation();
  Vector h_unused = Vector::Zero(static_cast<Eigen::Index>(fm.offsets.size()));
  LinearFlockModel base =
      build_custom(fm.weights, fm.weights, fm.leaders, opts.f, opts.g, h_unused);
  PlanarFlockModel model(std::move(base), fm.offsets, opts.planar);

  PlanarState init = equilibrium_state(model, 0.0, opts.speed);
  PlanarLeaderProgram program;
  program[0] = HeadingRamp{init.positions[0], opts.speed, 0.0, opts.turn, 0.0,
                           opts.ramp};

  PlanarIntegrateOptions integ;
  integ.dt = opts.dt;
  integ.horizon = opts.ramp + opts.settle;
  const double total = integ.horizon;
  for (int i = 0; i <= 8; ++i)
    integ.snapshot_times.push_back(total * i / 8.0);
  return {std::move(model), std::move(init), std::move(program), integ};
}

} // namespace flocklab
