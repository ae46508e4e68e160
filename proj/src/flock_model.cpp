#include "flocklab/flock_model.hpp"

#include "flocklab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace flocklab {

LinearFlockModel::LinearFlockModel(std::vector<int> leaders, Matrix L_rho,
                                   Matrix L_r, double f, double g,
                                   Vector offsets)
    : leaders_(std::move(leaders)),
      L_rho_(std::move(L_rho)),
      L_r_(std::move(L_r)),
      f_(f),
      g_(g),
      offsets_(std::move(offsets))
{
  const auto n = L_rho_.rows();
  if (n < 2)
    throw ModelError("n_agents", "a flock needs at least 2 agents");
  if (L_rho_.cols() != n)
    throw ModelError("L_rho", "matrix must be square");
  if (L_r_.rows() != n || L_r_.cols() != n)
    throw ModelError("L_r", fmt::format("expected {}x{} matrix", n, n));
  if (offsets_.size() != n)
    throw ModelError("h", fmt::format("expected {} offsets, got {}", n,
                                      offsets_.size()));
  if (leaders_.empty())
    throw ModelError("leaders", "at least one leader is required");
  if (!std::isfinite(f_))
    throw ModelError("f", "gain must be finite");
  if (!std::isfinite(g_))
    throw ModelError("g", "gain must be finite");

  std::sort(leaders_.begin(), leaders_.end());
  if (std::adjacent_find(leaders_.begin(), leaders_.end()) != leaders_.end())
    throw ModelError("leaders", "duplicate leader index");

  leader_mask_.assign(static_cast<std::size_t>(n), false);
  for (int k : leaders_) {
    if (k < 0 || k >= n)
      throw ModelError("leaders", fmt::format("index {} out of range", k));
    leader_mask_[static_cast<std::size_t>(k)] = true;
  }
  for (int k = 0; k < n; ++k)
    if (!leader_mask_[static_cast<std::size_t>(k)])
      followers_.push_back(k);
}

Vector default_offsets(int agents, double spacing)
{
  Vector h(agents);
  for (int k = 0; k < agents; ++k)
    h(k) = -spacing * k;
  return h;
}

namespace {

void require_open_unit(const char* field, double value)
{
  if (!(value > 0.0 && value < 1.0))
    throw ModelError(field, fmt::format("must lie in (0,1), got {}", value));
}

void require_negative(const char* field, double value)
{
  if (!(value < 0.0))
    throw ModelError(field, fmt::format("must be negative, got {}", value));
}

Matrix standard_laplacian(int followers, double weight)
{
  const int n = followers + 1;
  Matrix L = Matrix::Zero(n, n);
  for (int k = 1; k < followers; ++k) {
    L(k, k - 1) = -(1.0 - weight);
    L(k, k) = 1.0;
    L(k, k + 1) = -weight;
  }
  L(followers, followers - 1) = -1.0;
  L(followers, followers) = 1.0;
  return L;
}

Matrix assemble(const NeighborWeights& weights, const std::vector<bool>& lead,
                const char* field)
{
  const int n = static_cast<int>(weights.size());
  Matrix L = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    if (lead[static_cast<std::size_t>(k)])
      continue;
    const auto& row = weights[static_cast<std::size_t>(k)];
    if (row.empty())
      throw ModelError(field, fmt::format("follower {} has no neighbors", k));
    double sum = 0.0;
    for (const auto& nb : row) {
      if (nb.index < 0 || nb.index >= n)
        throw ModelError(field, fmt::format("row {}: neighbor {} out of range",
                                            k, nb.index));
      if (nb.index == k)
        throw ModelError(field, fmt::format("row {}: self-coupling", k));
      if (!std::isfinite(nb.weight))
        throw ModelError(field, fmt::format("row {}: non-finite weight", k));
      L(k, nb.index) -= nb.weight;
      sum += nb.weight;
    }
    L(k, k) = sum;
  }
  return L;
}

} // namespace

LinearFlockModel build_standard_example(const StandardExampleParams& p)
{
  if (p.followers < 1)
    throw ModelError("N", fmt::format("need at least one follower, got {}",
                                      p.followers));
  require_open_unit("rho", p.rho);
  require_open_unit("r", p.r);
  require_negative("f", p.f);
  require_negative("g", p.g);

  return LinearFlockModel({0}, standard_laplacian(p.followers, p.rho),
                          standard_laplacian(p.followers, p.r), p.f, p.g,
                          default_offsets(p.followers + 1));
}

LinearFlockModel build_custom(const NeighborWeights& weights_rho,
                              const NeighborWeights& weights_r,
                              std::vector<int> leaders, double f, double g,
                              Vector offsets)
{
  const auto n = weights_rho.size();
  if (weights_r.size() != n)
    throw ModelError("weights_r",
                     fmt::format("expected {} rows, got {}", n,
                                 weights_r.size()));
  if (n < 2)
    throw ModelError("n_agents", "a flock needs at least 2 agents");

  std::vector<bool> lead(n, false);
  for (int k : leaders) {
    if (k < 0 || static_cast<std::size_t>(k) >= n)
      throw ModelError("leaders", fmt::format("index {} out of range", k));
    lead[static_cast<std::size_t>(k)] = true;
  }

  if (offsets.size() == 0)
    offsets = default_offsets(static_cast<int>(n));

  return LinearFlockModel(std::move(leaders),
                          assemble(weights_rho, lead, "weights_rho"),
                          assemble(weights_r, lead, "weights_r"), f, g,
                          std::move(offsets));
}

LinearFlockModel build_random(int agents, std::uint64_t seed, double f,
                              double g, double density)
{
  if (agents < 2)
    throw ModelError("n_agents", "a flock needs at least 2 agents");
  if (!(density >= 0.0 && density <= 1.0))
    throw ModelError("density", "must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::bernoulli_distribution edge(density);

  const auto n = static_cast<std::size_t>(agents);
  NeighborWeights wp(n), wv(n);
  for (int k = 1; k < agents; ++k) {
    for (NeighborWeights* w : {&wp, &wv}) {
      auto& row = (*w)[static_cast<std::size_t>(k)];
      row.push_back({k - 1, weight(rng)});
      for (int i = 0; i < agents; ++i)
        if (i != k && i != k - 1 && edge(rng))
          row.push_back({i, weight(rng)});
      double sum = 0.0;
      for (const auto& nb : row)
        sum += nb.weight;
      for (auto& nb : row)
        nb.weight /= sum;
    }
  }
  return build_custom(wp, wv, {0}, f, g);
}

double ValidationReport::max_residual() const
{
  double worst = 0.0;
  for (double s : rho_row_sums)
    worst = std::max(worst, std::abs(s));
  for (double s : r_row_sums)
    worst = std::max(worst, std::abs(s));
  return worst;
}

bool ValidationReport::well_formed() const
{
  return max_residual() < kStructuralTolerance && leader_nonzeros.empty();
}

ValidationReport validate(const LinearFlockModel& m)
{
  ValidationReport rep;
  const int n = m.agent_count();
  for (int k = 0; k < n; ++k) {
    if (m.is_leader(k)) {
      for (int i = 0; i < n; ++i) {
        if (m.L_rho()(k, i) != 0.0)
          rep.leader_nonzeros.push_back({'p', k, i, m.L_rho()(k, i)});
        if (m.L_r()(k, i) != 0.0)
          rep.leader_nonzeros.push_back({'v', k, i, m.L_r()(k, i)});
      }
      continue;
    }
    rep.rho_row_sums.push_back(m.L_rho().row(k).sum());
    rep.r_row_sums.push_back(m.L_r().row(k).sum());
  }

  rep.f_negative = m.f() < 0.0;
  rep.g_negative = m.g() < 0.0;
  if (!rep.f_negative)
    rep.warnings.push_back(fmt::format(
        "f = {} is not stabilized by sign convention (expected f < 0)",
        m.f()));
  if (!rep.g_negative)
    rep.warnings.push_back(fmt::format(
        "g = {} is not stabilized by sign convention (expected g < 0)",
        m.g()));
  return rep;
}

FlockState galilean_shift(const FlockState& s, double Z, double V)
{
  FlockState out = s;
  out.z.array() += Z + V * s.t;
  out.zdot.array() += V;
  return out;
}

Vector acceleration(const LinearFlockModel& m, const Vector& z,
                    const Vector& zdot)
{
  return m.f() * (m.L_rho() * z) + m.g() * (m.L_r() * zdot);
}

} // namespace flocklab
