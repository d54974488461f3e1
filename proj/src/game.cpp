#include "nashbnb/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nashbnb/prng.hpp"

namespace nashbnb {

namespace {

// Odometer increment over joint profiles, player 0 fastest.
inline void advance_profile(std::vector<int>& a, const std::vector<int>& actions) {
  for (size_t j = 0; j < a.size(); ++j) {
    if (++a[j] < actions[j]) return;
    a[j] = 0;
  }
}

void check_player(const Game& g, int player) {
  if (player < 0 || player >= g.num_players())
    throw std::out_of_range("player index " + std::to_string(player) + " out of range");
}

void check_shape(const Game& g, const MixedProfile& p) {
  if (static_cast<int>(p.probs.size()) != g.num_players())
    throw std::invalid_argument("profile has wrong number of players");
  for (int i = 0; i < g.num_players(); ++i)
    if (static_cast<int>(p.probs[i].size()) != g.num_actions(i))
      throw std::invalid_argument("profile has wrong action count for player " +
                                  std::to_string(i));
}

}  // namespace

MixedProfile MixedProfile::uniform(const std::vector<int>& actions) {
  MixedProfile p;
  p.probs.reserve(actions.size());
  for (int m : actions) p.probs.emplace_back(m, 1.0 / m);
  return p;
}

MixedProfile MixedProfile::pure(const std::vector<int>& actions, const PureProfile& a) {
  MixedProfile p;
  p.probs.reserve(actions.size());
  for (size_t i = 0; i < actions.size(); ++i) {
    std::vector<double> v(actions[i], 0.0);
    v.at(a.actions.at(i)) = 1.0;
    p.probs.push_back(std::move(v));
  }
  return p;
}

Game::Game(std::vector<int> actions, std::vector<std::vector<double>> utilities)
    : actions_(std::move(actions)), utilities_(std::move(utilities)) {
  const int n = static_cast<int>(actions_.size());
  if (n < 2) throw std::invalid_argument("a game needs at least 2 players");
  strides_.resize(n);
  for (int i = 0; i < n; ++i) {
    if (actions_[i] < 1)
      throw std::invalid_argument("player " + std::to_string(i) + " has no actions");
    strides_[i] = num_profiles_;
    if (num_profiles_ > kDefaultEntryCap / actions_[i])
      throw std::invalid_argument("utility tensor exceeds the entry cap");
    num_profiles_ *= actions_[i];
    total_actions_ += actions_[i];
  }
  if (static_cast<int>(utilities_.size()) != n)
    throw std::invalid_argument("need one utility table per player");
  min_utility_.resize(n);
  max_utility_.resize(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<long>(utilities_[i].size()) != num_profiles_)
      throw std::invalid_argument("utility table of player " + std::to_string(i) +
                                  " has wrong size");
    double lo = utilities_[i][0], hi = utilities_[i][0];
    for (double u : utilities_[i]) {
      if (!std::isfinite(u)) throw std::invalid_argument("non-finite utility entry");
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    min_utility_[i] = lo;
    max_utility_[i] = hi;
  }
}

long Game::profile_index(const PureProfile& a) const {
  if (static_cast<int>(a.actions.size()) != num_players())
    throw std::invalid_argument("profile has wrong number of players");
  long p = 0;
  for (int j = 0; j < num_players(); ++j) {
    int aj = a.actions[j];
    if (aj < 0 || aj >= actions_[j]) throw std::out_of_range("action index out of range");
    p += aj * strides_[j];
  }
  return p;
}

MixedProfile checked_profile(const Game& g, MixedProfile p, double tol) {
  check_shape(g, p);
  for (int i = 0; i < g.num_players(); ++i) {
    double sum = 0.0;
    for (double& x : p.probs[i]) {
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite probability");
      if (x < -tol || x > 1.0 + tol)
        throw std::invalid_argument("probability outside [0,1] for player " +
                                    std::to_string(i));
      x = std::clamp(x, 0.0, 1.0);
      sum += x;
    }
    if (std::abs(sum - 1.0) > tol)
      throw std::invalid_argument("probabilities of player " + std::to_string(i) +
                                  " sum to " + std::to_string(sum));
    for (double& x : p.probs[i]) x /= sum;
  }
  return p;
}

std::vector<std::vector<double>> all_deviation_payoffs(const Game& g,
                                                       const MixedProfile& p) {
  check_shape(g, p);
  const int n = g.num_players();
  std::vector<std::vector<double>> dev(n);
  for (int i = 0; i < n; ++i) dev[i].assign(g.num_actions(i), 0.0);

  std::vector<int> a(n, 0);
  std::vector<double> prefix(n + 1), suffix(n + 1);
  for (long idx = 0; idx < g.num_profiles(); ++idx) {
    // prefix[i] = prod_{j<i} p_j(a_j), suffix[i] = prod_{j>=i} p_j(a_j)
    prefix[0] = 1.0;
    for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * p.probs[j][a[j]];
    suffix[n] = 1.0;
    for (int j = n - 1; j >= 0; --j) suffix[j] = suffix[j + 1] * p.probs[j][a[j]];
    for (int i = 0; i < n; ++i) {
      double others = prefix[i] * suffix[i + 1];
      if (others != 0.0) dev[i][a[i]] += others * g.utility(i, idx);
    }
    advance_profile(a, g.actions());
  }
  return dev;
}

double deviation_payoff(const Game& g, int player, int action, const MixedProfile& p) {
  check_player(g, player);
  check_shape(g, p);
  if (action < 0 || action >= g.num_actions(player))
    throw std::out_of_range("action index out of range");
  const int n = g.num_players();
  std::vector<int> a(n, 0);
  double out = 0.0;
  for (long idx = 0; idx < g.num_profiles(); ++idx) {
    if (a[player] == action) {
      double others = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != player) others *= p.probs[j][a[j]];
      out += others * g.utility(player, idx);
    }
    advance_profile(a, g.actions());
  }
  return out;
}

double expected_utility(const Game& g, int player, const MixedProfile& p) {
  check_player(g, player);
  check_shape(g, p);
  const int n = g.num_players();
  std::vector<int> a(n, 0);
  double out = 0.0;
  for (long idx = 0; idx < g.num_profiles(); ++idx) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= p.probs[j][a[j]];
    if (w != 0.0) out += w * g.utility(player, idx);
    advance_profile(a, g.actions());
  }
  return out;
}

std::vector<std::vector<std::vector<double>>> pairwise_deviation_payoffs(
    const Game& g, int player, const MixedProfile& p) {
  check_player(g, player);
  check_shape(g, p);
  const int n = g.num_players();
  std::vector<std::vector<std::vector<double>>> out(g.num_actions(player));
  for (auto& per_j : out) {
    per_j.resize(n);
    for (int j = 0; j < n; ++j)
      if (j != player) per_j[j].assign(g.num_actions(j), 0.0);
  }

  std::vector<int> a(n, 0);
  for (long idx = 0; idx < g.num_profiles(); ++idx) {
    double u = g.utility(player, idx);
    for (int j = 0; j < n; ++j) {
      if (j == player) continue;
      double others = 1.0;
      for (int k = 0; k < n; ++k)
        if (k != player && k != j) others *= p.probs[k][a[k]];
      if (others != 0.0) out[a[player]][j][a[j]] += others * u;
    }
    advance_profile(a, g.actions());
  }
  return out;
}

Exploitability exploitability(const Game& g, const MixedProfile& p) {
  auto dev = all_deviation_payoffs(g, p);
  Exploitability r;
  r.per_player.resize(g.num_players());
  for (int i = 0; i < g.num_players(); ++i) {
    double best = dev[i][0];
    double mixed = 0.0;
    for (int a = 0; a < g.num_actions(i); ++a) {
      best = std::max(best, dev[i][a]);
      mixed += p.probs[i][a] * dev[i][a];
    }
    // The best response dominates any mixture of deviations.
    r.per_player[i] = std::max(0.0, best - mixed);
    r.epsilon = std::max(r.epsilon, r.per_player[i]);
  }
  return r;
}

NormalizedGame normalize(const Game& g) {
  const int n = g.num_players();
  std::vector<AffineTransform> tf(n);
  std::vector<std::vector<double>> tables(n);
  for (int i = 0; i < n; ++i) {
    double lo = g.min_utility(i), hi = g.max_utility(i);
    if (hi > lo) {
      tf[i].scale = 1.0 / (hi - lo);
      tf[i].shift = -lo / (hi - lo);
    } else {
      tf[i].scale = 0.0;
      tf[i].shift = 0.0;
    }
    tables[i].reserve(g.num_profiles());
    for (long idx = 0; idx < g.num_profiles(); ++idx)
      tables[i].push_back(tf[i].scale * g.utility(i, idx) + tf[i].shift);
  }
  return NormalizedGame{Game(g.actions(), std::move(tables)), std::move(tf)};
}

Adjacency complete_graph(int n) {
  Adjacency adj(n, std::vector<bool>(n, true));
  for (int i = 0; i < n; ++i) adj[i][i] = false;
  return adj;
}

Adjacency path_graph(int n) {
  Adjacency adj(n, std::vector<bool>(n, false));
  for (int i = 0; i + 1 < n; ++i) adj[i][i + 1] = adj[i + 1][i] = true;
  return adj;
}

Adjacency small_world_graph(int n, uint64_t seed) {
  Adjacency adj(n, std::vector<bool>(n, false));
  if (n <= 1) return adj;
  auto connect = [&](int i, int j) {
    if (i != j) adj[i][j] = adj[j][i] = true;
  };
  for (int i = 0; i < n; ++i) connect(i, (i + 1) % n);
  SplitMix64 rng(seed);
  const double rewire_prob = 0.2;
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    if (rng.uniform() < rewire_prob) {
      int k = static_cast<int>(rng.below(n));
      if (k != i && !adj[i][k]) {
        adj[i][j] = adj[j][i] = false;
        connect(i, k);
      }
    }
  }
  return adj;
}

namespace {

void check_generator_args(int num_players, const std::vector<int>& actions,
                          long entry_cap) {
  if (num_players < 2) throw std::invalid_argument("need at least 2 players");
  if (static_cast<int>(actions.size()) != num_players)
    throw std::invalid_argument("need one action count per player");
  long entries = num_players;
  for (int m : actions) {
    if (m < 1) throw std::invalid_argument("action counts must be positive");
    if (entries > entry_cap / m)
      throw std::invalid_argument("requested game exceeds the entry cap");
    entries *= m;
  }
}

}  // namespace

Game generate_random(int num_players, const std::vector<int>& actions, uint64_t seed,
                     long entry_cap) {
  return generate_graphical(num_players, actions, complete_graph(num_players), seed,
                            entry_cap);
}

Game generate_graphical(int num_players, const std::vector<int>& actions,
                        const Adjacency& graph, uint64_t seed, long entry_cap) {
  check_generator_args(num_players, actions, entry_cap);
  if (static_cast<int>(graph.size()) != num_players)
    throw std::invalid_argument("adjacency size does not match player count");
  for (const auto& row : graph)
    if (static_cast<int>(row.size()) != num_players)
      throw std::invalid_argument("adjacency is not square");

  std::vector<std::vector<double>> tables(num_players);
  for (int i = 0; i < num_players; ++i) {
    // Scope of player i: own action plus neighbors, ascending player order.
    std::vector<int> scope;
    for (int j = 0; j < num_players; ++j)
      if (j == i || graph[i][j]) scope.push_back(j);

    long local_size = 1;
    for (int j : scope) local_size *= actions[j];
    std::vector<double> local(local_size);
    SplitMix64 rng(player_stream_seed(seed, i));
    for (double& x : local) x = rng.uniform();

    // Broadcast over non-neighbors; the local table is enumerated with the
    // lowest-index scope player fastest, matching the global profile order.
    long total = 1;
    for (int m : actions) total *= m;
    std::vector<long> local_stride(num_players, 0);
    long s = 1;
    for (int j : scope) {
      local_stride[j] = s;
      s *= actions[j];
    }
    std::vector<double>& table = tables[i];
    table.resize(total);
    std::vector<int> a(num_players, 0);
    for (long idx = 0; idx < total; ++idx) {
      long q = 0;
      for (int j : scope) q += a[j] * local_stride[j];
      table[idx] = local[q];
      advance_profile(a, actions);
    }
  }
  return Game(actions, std::move(tables));
}

}  // namespace nashbnb
