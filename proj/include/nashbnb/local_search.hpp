#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nashbnb/formulation.hpp"
#include "nashbnb/game.hpp"

namespace nashbnb {

struct LocalSearchConfig {
  int max_iters = 400;
  int restarts = 8;
  double target_varpi = 1e-8;
  // Log-sum-exp smoothing temperature; halved whenever progress stalls for
  // stall_iters iterations, floored at min_temperature.
  double initial_temperature = 0.05;
  double min_temperature = 1e-6;
  int stall_iters = 50;
  double initial_step = 1.0;
  uint64_t seed = 0;
  std::ostream* trace = nullptr;  // optional CSV: restart,iteration,penalty
};

// Log-sum-exp smoothing (temperature tau) of the penalty terms
// p_i(a) * (v*_i - u_i(a, p_{-i})) with the value variables eliminated at
// their best-response choice.
double smoothed_penalty(const Game& g, const MixedProfile& p, double temperature);

// Gradient of smoothed_penalty in every strategy entry, treating the
// best-response value by its envelope (max) subgradient with first-index
// tie-breaking. Finite everywhere.
std::vector<std::vector<double>> penalty_gradient(const Game& g, const MixedProfile& p,
                                                  double temperature);

// Stage 1: multiplicative-weights descent on the smoothed penalty over the
// product of simplices, refined by Newton steps on the indifference system
// of the identified support. Always returns a feasible point (values at
// best response, so stationarity holds exactly); the uniform profile is the
// first start and the best point over all restarts is returned.
CandidateSolution local_solve(const Game& g, const LocalSearchConfig& cfg = {});

// Single-start refinement used to polish projected relaxation points inside
// the tree search. Deterministic.
CandidateSolution local_polish(const Game& g, const MixedProfile& start, int max_iters,
                               double target_varpi);

}  // namespace nashbnb
