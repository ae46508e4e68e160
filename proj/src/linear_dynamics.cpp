#include "flocklab/linear_dynamics.hpp"

#include "flocklab/errors.hpp"
#include "flocklab/spectrum.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace flocklab {

FollowerBlocks follower_reduction(const LinearFlockModel& m)
{
  FollowerBlocks b;
  b.followers = m.followers();
  b.leaders = m.leaders();
  const auto nf = static_cast<Eigen::Index>(b.followers.size());
  const auto nl = static_cast<Eigen::Index>(b.leaders.size());
  b.ff_rho.resize(nf, nf);
  b.ff_r.resize(nf, nf);
  b.fl_rho.resize(nf, nl);
  b.fl_r.resize(nf, nl);
  for (Eigen::Index i = 0; i < nf; ++i) {
    const int row = b.followers[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < nf; ++j) {
      const int col = b.followers[static_cast<std::size_t>(j)];
      b.ff_rho(i, j) = m.L_rho()(row, col);
      b.ff_r(i, j) = m.L_r()(row, col);
    }
    for (Eigen::Index j = 0; j < nl; ++j) {
      const int col = b.leaders[static_cast<std::size_t>(j)];
      b.fl_rho(i, j) = m.L_rho()(row, col);
      b.fl_r(i, j) = m.L_r()(row, col);
    }
  }
  return b;
}

Matrix companion_matrix(const LinearFlockModel& m)
{
  const FollowerBlocks b = follower_reduction(m);
  const auto nf = b.ff_rho.rows();
  Matrix A = Matrix::Zero(2 * nf, 2 * nf);
  A.topRightCorner(nf, nf).setIdentity();
  A.bottomLeftCorner(nf, nf) = m.f() * b.ff_rho;
  A.bottomRightCorner(nf, nf) = m.g() * b.ff_r;
  return A;
}

double companion_spectral_radius(const LinearFlockModel& m)
{
  const Matrix A = companion_matrix(m);
  if (A.size() == 0)
    return 0.0;
  return spectral_summary(eigenvalues(A)).spectral_radius;
}

double mechanical_energy(const LinearFlockModel& m, const Vector& z,
                         const Vector& zdot)
{
  // (L^S z, z) == (L z, z): the antisymmetric part contributes nothing.
  return 0.5 * (zdot.squaredNorm() - m.f() * z.dot(m.L_rho() * z));
}

namespace {

// Follower rows of both Laplacians in compressed form, columns over all
// agents. The standard example has three nonzeros per row, so this is what
// keeps 1e6-unit horizons affordable.
struct SparseRows
{
  std::vector<std::size_t> start;
  std::vector<int> col;
  std::vector<double> val;

  SparseRows(const Matrix& L, const std::vector<int>& rows)
  {
    start.push_back(0);
    for (int k : rows) {
      for (Eigen::Index i = 0; i < L.cols(); ++i) {
        if (L(k, i) != 0.0) {
          col.push_back(static_cast<int>(i));
          val.push_back(L(k, i));
        }
      }
      start.push_back(col.size());
    }
  }

  double row_dot(std::size_t r, const std::vector<double>& x) const
  {
    double s = 0.0;
    for (std::size_t p = start[r]; p < start[r + 1]; ++p)
      s += val[p] * x[static_cast<std::size_t>(col[p])];
    return s;
  }
};

class FollowerSystem
{
public:
  FollowerSystem(const LinearFlockModel& m, const FlockState& init,
                 const LeaderProgram& program)
      : f_(m.f()),
        g_(m.g()),
        followers_(m.followers()),
        leaders_(m.leaders()),
        rho_(m.L_rho(), m.followers()),
        vel_(m.L_r(), m.followers())
  {
    for (int l : leaders_) {
      const auto it = program.find(l);
      if (it != program.end()) {
        check_signal(it->second);
        signals_.push_back(it->second);
      }
      else {
        // coast: z(t) = z(t0) + v(t0) (t - t0)
        const double v0 = init.zdot(l);
        signals_.push_back(ConstantVelocity{init.z(l) - v0 * init.t, v0});
      }
    }
  }

  const std::vector<int>& followers() const { return followers_; }

  void set_leaders(double t, std::vector<double>& z, std::vector<double>& v) const
  {
    for (std::size_t j = 0; j < leaders_.size(); ++j) {
      const LeaderSample s = sample(signals_[j], t);
      z[static_cast<std::size_t>(leaders_[j])] = s.position;
      v[static_cast<std::size_t>(leaders_[j])] = s.velocity;
    }
  }

  // Follower accelerations for full-length z, v.
  void accel(const std::vector<double>& z, const std::vector<double>& v,
             std::vector<double>& out) const
  {
    for (std::size_t i = 0; i < followers_.size(); ++i)
      out[i] = f_ * rho_.row_dot(i, z) + g_ * vel_.row_dot(i, v);
  }

  double energy(const std::vector<double>& z, const std::vector<double>& v) const
  {
    double kinetic = 0.0;
    for (double x : v)
      kinetic += x * x;
    double potential = 0.0;
    for (std::size_t i = 0; i < followers_.size(); ++i)
      potential += z[static_cast<std::size_t>(followers_[i])] * rho_.row_dot(i, z);
    return 0.5 * (kinetic - f_ * potential);
  }

private:
  double f_;
  double g_;
  std::vector<int> followers_;
  std::vector<int> leaders_;
  std::vector<LeaderSignal> signals_;
  SparseRows rho_;
  SparseRows vel_;
};

FlockState snapshot(double t, const std::vector<double>& z,
                    const std::vector<double>& v)
{
  FlockState s;
  s.t = t;
  s.z = Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(z.size()));
  s.zdot = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  return s;
}

double infinity_norm_bound(const LinearFlockModel& m)
{
  double bound = 1.0;
  for (int k : m.followers())
    bound = std::max(bound, std::abs(m.f()) * m.L_rho().row(k).cwiseAbs().sum() +
                                std::abs(m.g()) * m.L_r().row(k).cwiseAbs().sum());
  return bound;
}

} // namespace

Trajectory integrate(const LinearFlockModel& m, const FlockState& init,
                     const LeaderProgram& program,
                     const IntegrateOptions& opts)
{
  const auto n = m.agent_count();
  if (init.z.size() != n || init.zdot.size() != n)
    throw ModelError("init", fmt::format("state must have {} entries", n));
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt))
    throw ModelError("dt", "time step must be positive");
  if (!(opts.horizon >= 0.0) || !std::isfinite(opts.horizon))
    throw ModelError("horizon", "horizon must be nonnegative and finite");

  Trajectory traj;
  if (opts.dt * infinity_norm_bound(m) >= 2.5) {
    const double radius = companion_spectral_radius(m);
    if (opts.dt * radius >= 2.5)
      traj.warnings.push_back(fmt::format(
          "dt * spectral radius = {:.3g} exceeds the RK4 margin 2.5",
          opts.dt * radius));
  }

  const FollowerSystem sys(m, init, program);
  const std::vector<int>& fol = sys.followers();
  const std::size_t nf = fol.size();
  const auto na = static_cast<std::size_t>(n);

  std::vector<double> z(init.z.data(), init.z.data() + na);
  std::vector<double> v(init.zdot.data(), init.zdot.data() + na);

  const double t0 = init.t;
  const double dt = opts.dt;
  const auto total = static_cast<std::size_t>(
      std::ceil(opts.horizon / dt - 1e-9));
  traj.stride = std::max<std::size_t>(
      1, (total + opts.max_samples - 1) / std::max<std::size_t>(1, opts.max_samples));

  const auto last = static_cast<std::size_t>(m.last_agent());
  double t_last_increase = t0;
  double peak_energy = 0.0;

  auto observe = [&](double t) {
    for (std::size_t k = 0; k < na; ++k) {
      const double a = std::abs(z[k]);
      if (!std::isfinite(a))
        throw BlowUpError(t, fmt::format("state became non-finite at t = {}", t));
      traj.max_abs_z_any = std::max(traj.max_abs_z_any, a);
    }
    const double zN = std::abs(z[last]);
    if (zN > traj.max_abs_zN) {
      traj.max_abs_zN = zN;
      traj.argmax_zN = t;
      t_last_increase = t;
    }
  };
  auto record = [&](double t) {
    if (!opts.record_states)
      return;
    traj.times.push_back(t);
    traj.states.push_back(snapshot(t, z, v));
  };

  sys.set_leaders(t0, z, v);
  observe(t0);
  record(t0);
  if (opts.stop.kind == StopRule::Kind::EnergySettled)
    peak_energy = std::abs(sys.energy(z, v));

  // stage buffers: full-length positions/velocities, follower derivatives
  std::vector<double> zs(z), vs(v);
  std::vector<double> a1(nf), a2(nf), a3(nf), a4(nf);
  std::vector<double> v1(nf), v2(nf), v3(nf), v4(nf);
  const std::size_t check_every =
      static_cast<std::size_t>(std::max(1, opts.stop.check_every));

  auto stage = [&](double h, const std::vector<double>& dz,
                   const std::vector<double>& dv) {
    for (std::size_t i = 0; i < nf; ++i) {
      const auto k = static_cast<std::size_t>(fol[i]);
      zs[k] = z[k] + h * dz[i];
      vs[k] = v[k] + h * dv[i];
    }
  };

  std::size_t step = 0;
  double t = t0;
  while (step < total) {
    for (std::size_t i = 0; i < nf; ++i)
      v1[i] = v[static_cast<std::size_t>(fol[i])];
    sys.accel(z, v, a1);

    sys.set_leaders(t + 0.5 * dt, zs, vs);
    stage(0.5 * dt, v1, a1);
    for (std::size_t i = 0; i < nf; ++i)
      v2[i] = vs[static_cast<std::size_t>(fol[i])];
    sys.accel(zs, vs, a2);

    stage(0.5 * dt, v2, a2);
    for (std::size_t i = 0; i < nf; ++i)
      v3[i] = vs[static_cast<std::size_t>(fol[i])];
    sys.accel(zs, vs, a3);

    sys.set_leaders(t + dt, zs, vs);
    stage(dt, v3, a3);
    for (std::size_t i = 0; i < nf; ++i)
      v4[i] = vs[static_cast<std::size_t>(fol[i])];
    sys.accel(zs, vs, a4);

    for (std::size_t i = 0; i < nf; ++i) {
      const auto k = static_cast<std::size_t>(fol[i]);
      z[k] += dt / 6.0 * (v1[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
      v[k] += dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
    }

    ++step;
    t = t0 + static_cast<double>(step) * dt;
    sys.set_leaders(t, z, v);
    observe(t);

    bool stop = false;
    if (opts.stop.kind == StopRule::Kind::EnergySettled && step % check_every == 0) {
      const double e = std::abs(sys.energy(z, v));
      peak_energy = std::max(peak_energy, e);
      const bool settled = e <= opts.stop.energy_ratio * peak_energy;
      const bool quiet = (t - t_last_increase) >= opts.stop.quiet_fraction * (t - t0);
      stop = settled && quiet;
    }

    if (step % traj.stride == 0 || step == total || stop)
      record(t);
    if (stop) {
      traj.stopped_early = step < total;
      break;
    }
  }

  traj.steps = step;
  traj.end_time = t;
  return traj;
}

IntegrateOptions impulse_defaults()
{
  IntegrateOptions o;
  o.dt = 0.01;
  o.horizon = 1e6;
  o.stop.kind = StopRule::Kind::EnergySettled;
  return o;
}

Trajectory step_response(const LinearFlockModel& m, double v_leader,
                         const IntegrateOptions& opts)
{
  FlockState init;
  init.t = 0.0;
  init.z = Vector::Zero(m.agent_count());
  init.zdot = Vector::Zero(m.agent_count());
  for (int k : m.followers())
    init.zdot(k) = -v_leader;

  LeaderProgram pinned;
  for (int l : m.leaders())
    pinned[l] = ConstantVelocity{0.0, 0.0};
  return integrate(m, init, pinned, opts);
}

} // namespace flocklab
