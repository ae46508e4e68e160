#include "flocklab/leader_program.hpp"

#include "flocklab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace flocklab {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

LeaderSample sample_piecewise(const PiecewiseLinear& p, double t)
{
  const auto& ts = p.times;
  const auto& xs = p.positions;
  if (ts.size() == 1 || t < ts.front())
    return {xs.front(), 0.0};
  if (t >= ts.back())
    return {xs.back(), 0.0};
  const auto hi = std::upper_bound(ts.begin(), ts.end(), t);
  const auto i = static_cast<std::size_t>(hi - ts.begin()) - 1;
  const double slope = (xs[i + 1] - xs[i]) / (ts[i + 1] - ts[i]);
  return {xs[i] + slope * (t - ts[i]), slope};
}

} // namespace

LeaderSample sample(const LeaderSignal& signal, double t)
{
  return std::visit(
      overloaded{
          [t](const ConstantVelocity& c) -> LeaderSample {
            return {c.position0 + c.velocity * t, c.velocity};
          },
          [t](const Sinusoid& s) -> LeaderSample {
            const double arg = s.omega * t + s.phase;
            return {s.offset + s.amplitude * std::sin(arg),
                    s.amplitude * s.omega * std::cos(arg)};
          },
          [t](const PiecewiseLinear& p) { return sample_piecewise(p, t); }},
      signal);
}

void check_signal(const LeaderSignal& signal)
{
  if (const auto* p = std::get_if<PiecewiseLinear>(&signal)) {
    if (p->times.empty() || p->times.size() != p->positions.size())
      throw ModelError("leader_program",
                       "piecewise-linear knots need matching, nonempty "
                       "times and positions");
    if (std::adjacent_find(p->times.begin(), p->times.end(),
                           std::greater_equal<>()) != p->times.end())
      throw ModelError("leader_program",
                       "piecewise-linear knot times must increase strictly");
  }
  else if (const auto* s = std::get_if<Sinusoid>(&signal)) {
    if (!std::isfinite(s->omega) || !std::isfinite(s->amplitude))
      throw ModelError("leader_program", "sinusoid parameters must be finite");
  }
}

} // namespace flocklab
