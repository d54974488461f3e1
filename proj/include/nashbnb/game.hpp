#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nashbnb {

// One action index per player.
struct PureProfile {
  std::vector<int> actions;
};

// One probability vector per player. Entries live in [0, 1] and each
// player's vector sums to 1 (validated / renormalized on ingestion).
struct MixedProfile {
  std::vector<std::vector<double>> probs;

  static MixedProfile uniform(const std::vector<int>& actions);
  static MixedProfile pure(const std::vector<int>& actions, const PureProfile& a);
};

// Finite normal-form game with a dense utility tensor per player.
//
// Joint profiles are indexed with player 0's action varying fastest
// (column-major in the Gambit sense): index(a) = sum_j a_j * stride_j with
// stride_0 = 1. Per-player utility extrema are recomputed from the tensor,
// never trusted from input.
class Game {
 public:
  Game(std::vector<int> actions, std::vector<std::vector<double>> utilities);

  int num_players() const { return static_cast<int>(actions_.size()); }
  const std::vector<int>& actions() const { return actions_; }
  int num_actions(int player) const { return actions_[player]; }
  long num_profiles() const { return num_profiles_; }
  const std::vector<long>& strides() const { return strides_; }

  long profile_index(const PureProfile& a) const;
  double utility(int player, long profile) const { return utilities_[player][profile]; }
  double utility(int player, const PureProfile& a) const {
    return utilities_[player][profile_index(a)];
  }
  const std::vector<double>& utility_table(int player) const { return utilities_[player]; }

  double min_utility(int player) const { return min_utility_[player]; }
  double max_utility(int player) const { return max_utility_[player]; }

  // Total action count over players; the number of strategy variables.
  int total_actions() const { return total_actions_; }

 private:
  std::vector<int> actions_;
  std::vector<std::vector<double>> utilities_;
  std::vector<long> strides_;
  std::vector<double> min_utility_;
  std::vector<double> max_utility_;
  long num_profiles_ = 1;
  int total_actions_ = 0;
};

// Validates shape, clamps negative dust, and renormalizes each player's
// vector when its sum is within `tol` of 1; rejects otherwise.
MixedProfile checked_profile(const Game& g, MixedProfile p, double tol = 1e-9);

// Expected utility of `player` under mixed profile `p` (full tensor
// contraction, fixed summation order).
double expected_utility(const Game& g, int player, const MixedProfile& p);

// Expected utility of `player` when playing `action` against p_{-player}.
double deviation_payoff(const Game& g, int player, int action, const MixedProfile& p);

// Deviation payoffs of every action of every player in one tensor sweep.
// result[i][a] = u_i(a, p_{-i}).
std::vector<std::vector<double>> all_deviation_payoffs(const Game& g, const MixedProfile& p);

// Second-order deviation payoffs for one player: for every own action a and
// every opponent pair (j, b), the expected utility with both a and b pinned:
// result[a][j][b] = u_i(a, b_j, p_{-i,j}). Column j == player is unused.
std::vector<std::vector<std::vector<double>>> pairwise_deviation_payoffs(
    const Game& g, int player, const MixedProfile& p);

struct Exploitability {
  double epsilon = 0.0;                // max over players
  std::vector<double> per_player;      // best-response gain per player
};

// Unilateral deviation gains: per_player[i] = max_a u_i(a, p_{-i}) - u_i(p).
Exploitability exploitability(const Game& g, const MixedProfile& p);

// Per-player affine map applied to utilities: u' = scale * u + shift.
struct AffineTransform {
  double scale = 1.0;
  double shift = 0.0;
};

struct NormalizedGame {
  Game game;
  std::vector<AffineTransform> transforms;
};

// Maps each player's utilities onto [0, 1]. A player with constant payoffs
// maps to all zeros and records scale 0.
NormalizedGame normalize(const Game& g);

// Player adjacency for graphical games; adjacency[i][j] == true means player
// j's action enters player i's utility. Symmetric, diagonal ignored.
using Adjacency = std::vector<std::vector<bool>>;

Adjacency complete_graph(int n);
Adjacency path_graph(int n);
// Watts-Strogatz ring: each player linked to its nearest neighbor on both
// sides, then every edge rewired with probability 0.2. Our own convention;
// documented here rather than matched to any external generator.
Adjacency small_world_graph(int n, uint64_t seed);

inline constexpr long kDefaultEntryCap = 100'000'000;

// I.i.d. uniform [0,1) payoffs, one SplitMix64 stream per player.
Game generate_random(int num_players, const std::vector<int>& actions, uint64_t seed,
                     long entry_cap = kDefaultEntryCap);

// Player i's utility depends only on its own action and its neighbors'
// actions; the local table is i.i.d. uniform [0,1) and broadcast densely
// over non-neighbors. With a complete graph the tensor is bit-identical to
// generate_random under the same seed.
Game generate_graphical(int num_players, const std::vector<int>& actions,
                        const Adjacency& graph, uint64_t seed,
                        long entry_cap = kDefaultEntryCap);

}  // namespace nashbnb
