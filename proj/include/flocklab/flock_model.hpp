#pragma once

// Linear flock models in leader/follower form.
//
// Agent k obeys  z_k'' = f * sum_i L_rho[k,i] z_i + g * sum_i L_r[k,i] z_i'
// with z_k = x_k - h_k. Follower rows of both Laplacians sum to zero; leader
// rows are identically zero and leaders are driven by boundary data at
// simulation time.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace flocklab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kStructuralTolerance = 1e-12;

struct StandardExampleParams
{
  int followers = 100; ///< N; the model has N + 1 agents
  double rho = 0.5;
  double r = 0.5;
  double f = -1.0;
  double g = -2.0;
};

class LinearFlockModel
{
public:
  /// Only shape consistency is checked here; use validate() for structure.
  LinearFlockModel(std::vector<int> leaders, Matrix L_rho, Matrix L_r,
                   double f, double g, Vector offsets);

  int agent_count() const noexcept { return static_cast<int>(L_rho_.rows()); }
  /// Index of the last agent (the "N" of max |z_N|).
  int last_agent() const noexcept { return agent_count() - 1; }

  const std::vector<int>& leaders() const noexcept { return leaders_; }
  const std::vector<int>& followers() const noexcept { return followers_; }
  bool is_leader(int k) const { return leader_mask_.at(k); }

  const Matrix& L_rho() const noexcept { return L_rho_; }
  const Matrix& L_r() const noexcept { return L_r_; }
  double f() const noexcept { return f_; }
  double g() const noexcept { return g_; }
  const Vector& offsets() const noexcept { return offsets_; }

private:
  std::vector<int> leaders_;
  std::vector<int> followers_;
  std::vector<bool> leader_mask_;
  Matrix L_rho_;
  Matrix L_r_;
  double f_;
  double g_;
  Vector offsets_;
};

/// h_k = -spacing * k: unit gaps, agent 0 rightmost.
Vector default_offsets(int agents, double spacing = 1.0);

/// Agent 0 leads; interior rows [-(1-rho), 1, -rho], last row [-1, 1].
LinearFlockModel build_standard_example(const StandardExampleParams& p);

struct Neighbor
{
  int index;
  double weight;
};

/// Per-agent neighbor lists. Entry k lists the agents whose relative
/// position (or velocity) agent k measures.
using NeighborWeights = std::vector<std::vector<Neighbor>>;

/// Off-diagonal entries are -weight, the diagonal absorbs the sum so every
/// follower row sums to zero. Leader rows are zeroed whatever their lists
/// contain. Empty `offsets` selects default_offsets().
LinearFlockModel build_custom(const NeighborWeights& weights_rho,
                              const NeighborWeights& weights_r,
                              std::vector<int> leaders, double f, double g,
                              Vector offsets = {});

/// Seeded random topology: agent 0 leads, follower k always measures k-1
/// (so every follower is connected to the leader) plus each other agent with
/// probability `density`. Weights are uniform on [0.1, 1], independently for
/// the position and velocity graphs; rows are normalized to unit sum.
LinearFlockModel build_random(int agents, std::uint64_t seed, double f,
                              double g, double density = 0.3);

struct LeaderEntry
{
  char matrix; ///< 'p' for L_rho, 'v' for L_r
  int row;
  int col;
  double value;
};

struct ValidationReport
{
  std::vector<double> rho_row_sums; ///< follower rows only, agent order
  std::vector<double> r_row_sums;
  std::vector<LeaderEntry> leader_nonzeros;
  bool f_negative = false;
  bool g_negative = false;
  std::vector<std::string> warnings;

  double max_residual() const;
  bool well_formed() const;
};

ValidationReport validate(const LinearFlockModel& m);

struct FlockState
{
  double t = 0.0;
  Vector z;
  Vector zdot;
};

/// Member of the two-parameter invariance group: z -> z + Z + V t, z' -> z' + V.
FlockState galilean_shift(const FlockState& s, double Z, double V);

/// Right-hand side of the full (leaders included) second-order system.
Vector acceleration(const LinearFlockModel& m, const Vector& z,
                    const Vector& zdot);

} // namespace flocklab
