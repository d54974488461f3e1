#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "nashbnb/formulation.hpp"
#include "nashbnb/game.hpp"
#include "nashbnb/local_search.hpp"
#include "nashbnb/relaxation.hpp"

namespace nashbnb {

// Tree node: a box over all strategy and value variables plus the best
// relaxation bound proven for the region (monotone along root-leaf paths).
struct Node {
  Box box;
  double lower_bound = 0.0;
  int depth = 0;
  long id = 0;
};

enum class SolveStatus { Optimal, EpsilonReached, Limit };
std::string to_string(SolveStatus s);

struct SolveConfig {
  double gap_tol_abs = 1e-9;
  // Early termination: stop as soon as the incumbent penalty reaches this
  // value (negative disables; this is the certified-quality mode).
  double varpi_target = -1.0;
  double time_limit_s = 0.0;  // 0: no limit
  long node_limit = 1'000'000;
  int plunge_depth = 4;       // depth-first dives after branching
  bool warm_start = true;     // run stage 1 before the tree search
  bool polish_incumbent = true;
  long polish_period = 16;    // also polish every k-th node (0: only on
                              // incumbent improvement)
  bool root_tighten = true;   // bound tightening at the root, capped at the
                              // incumbent penalty
  int workers = 1;
  bool deterministic = true;  // forces one worker; wall time reported as 0
  uint64_t seed = 0;
  LocalSearchConfig local;    // stage-1 settings (seed is overridden)
  std::ostream* node_log = nullptr;  // id \t depth \t bound \t incumbent \t gap
};

struct SolveStats {
  long nodes = 0;
  long lp_solves = 0;
  double wall_time_s = 0.0;
  double global_lower = 0.0;
};

struct SolveResult {
  CandidateSolution solution;
  SolveStatus status = SolveStatus::Limit;
  double certified_epsilon = 0.0;  // penalty * max actions
  double measured_epsilon = 0.0;   // exploitability of the returned profile
  SolveStats stats;
};

// Two-stage spatial branch and bound: a local penalty minimizer seeds the
// incumbent, then best-bound search with plunging over box subdivisions,
// pruning regions whose relaxation bound reaches the incumbent. Early
// termination still returns a feasible point with a valid certificate.
SolveResult solve(const Game& g, const SolveConfig& cfg = {});

// Projects a relaxation point onto feasibility (strategies onto their box
// simplex slices, values at best response) and evaluates it.
CandidateSolution project_lp_point(const Game& g, const VarIndex& vars, const Box& box,
                                   const Relaxation& rel, const std::vector<double>& x);

struct BranchChoice {
  int var = -1;
  double split = 0.0;
};

// Scores variables by the envelope violations they participate in at the
// relaxation point; widest-interval fallback when everything is tight.
// Returns var = -1 when no variable is wide enough to split.
BranchChoice select_branch_variable(const Game& g, const VarIndex& vars, const Node& node,
                                    const Relaxation& rel, const std::vector<double>& x);

}  // namespace nashbnb
