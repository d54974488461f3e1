#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nashbnb/game.hpp"

namespace nashbnb {

// A candidate point of the penalized continuous program: strategy profile,
// per-player value variables bounded by [min u_i, max u_i], and the penalty
// objective (the largest absolute complementarity term).
struct CandidateSolution {
  MixedProfile profile;
  std::vector<double> values;
  double penalty = 0.0;
};

// Witness variables of the mixed-integer feasibility encoding: per-action
// support indicators z and slacks s_i(a_i) = v_i - u_i(a_i, p_{-i}).
struct MipWitness {
  MixedProfile profile;
  std::vector<double> values;
  std::vector<std::vector<int>> z;
  std::vector<std::vector<double>> s;
};

// Default residual tolerance for feasibility checks and conversions.
inline constexpr double kFeasTol = 1e-8;

// Support threshold: entries above it count as played when building the
// integer witness.
inline constexpr double kSupportTol = 1e-9;

// penalty = max_{i,a} |p_i(a) * (v_i - u_i(a, p_{-i}))|, plus the arg-max
// term for branching diagnostics.
struct PenaltyValue {
  double penalty = 0.0;
  int worst_player = 0;
  int worst_action = 0;
};
PenaltyValue eval_penalty(const Game& g, const MixedProfile& p,
                          const std::vector<double>& values);

// Violation magnitudes per constraint family of the complementarity program.
struct QFeasReport {
  double stationarity = 0.0;     // max_{i,a} (u_i(a, p_{-i}) - v_i)_+
  double complementarity = 0.0;  // max_{i,a} |p_i(a) (v_i - u_i(a, p_{-i}))|
  double simplex = 0.0;          // max_i |sum_a p_i(a) - 1| and negativity
  double box = 0.0;              // distance of v_i, p_i(a) from their boxes

  double max_violation() const;
  bool feasible(double tol = kFeasTol) const { return max_violation() <= tol; }
  std::string describe() const;
};
QFeasReport check_Q_feasible(const Game& g, const MixedProfile& p,
                             const std::vector<double>& values);

// Residuals of the mixed-integer encoding for a full witness.
struct PFeasReport {
  double value_identity = 0.0;   // |v_i - s_i(a) - u_i(a, p_{-i})|
  double support_link = 0.0;     // (p_i(a) - z_i(a))_+
  double slack_bigm = 0.0;       // (s_i(a) - (1 - z_i(a)) range_i)_+
  double simplex = 0.0;
  double box = 0.0;              // s, v, p box residuals
  double max_violation() const;
  bool feasible(double tol = kFeasTol) const { return max_violation() <= tol; }
  std::string describe() const;
};
PFeasReport check_P_feasible(const Game& g, const MipWitness& w);

// Constructive conversion of a feasible-within-tol complementarity point to
// an integer witness; refuses with the violating constraint otherwise.
MipWitness q_to_p_witness(const Game& g, const MixedProfile& p,
                          const std::vector<double>& values, double tol = kFeasTol);

// Forward direction: drops (z, s) from a feasible witness and asserts the
// remaining point satisfies the complementarity program.
CandidateSolution p_to_q_project(const Game& g, const MipWitness& w,
                                 double tol = kFeasTol);

// Approximation guarantee: a feasible point with penalty w is an eps-Nash
// equilibrium with eps = w * max_i |A_i|.
double epsilon_bound(double penalty, const Game& g);

// v*_i = max_a u_i(a, p_{-i}); the penalty-minimizing stationarity-feasible
// choice of the value variables for fixed p.
std::vector<double> best_response_values(const Game& g, const MixedProfile& p);

}  // namespace nashbnb
