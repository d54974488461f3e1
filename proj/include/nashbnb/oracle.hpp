#pragma once

#include <iosfwd>
#include <vector>

#include "nashbnb/game.hpp"

namespace nashbnb {

struct PureScanResult {
  PureProfile best_profile;
  double best_epsilon = 0.0;
  // Per-profile table in profile-index order; filled only for small games.
  std::vector<double> epsilon_table;
};

inline constexpr long kPureScanCap = 10'000'000;
inline constexpr long kPureScanTableCap = 10'000;

// Exhaustive exploitability of every pure profile; the minimizer is zero
// exactly when a pure equilibrium exists.
PureScanResult pure_epsilon_scan(const Game& g, long profile_cap = kPureScanCap);

// Exact two-player oracle: solves the linear indifference-and-feasibility
// system of every support pair and returns the equilibria found, each
// verified to exploitability <= 1e-9. Rank-deficient supports are skipped.
// Intended for games with at most ~5 actions per player.
std::vector<MixedProfile> support_enumeration_2p(const Game& g, int max_support = 5);

// Debug dump of the per-profile table: action indices and epsilon per row.
void write_epsilon_table_csv(std::ostream& out, const Game& g, const PureScanResult& r);

}  // namespace nashbnb
