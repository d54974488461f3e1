#pragma once

#include <array>
#include <utility>
#include <vector>

#include "nashbnb/game.hpp"
#include "nashbnb/simplex.hpp"

namespace nashbnb {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

Interval interval_mul(Interval a, Interval b);

// Rectangular subregion over all strategy entries and value variables.
using Box = std::vector<Interval>;

// Fixed global ordering of branchable variables: strategy entries grouped by
// player in action order, then one value variable per player.
class VarIndex {
 public:
  explicit VarIndex(const Game& g);

  int strategy(int player, int action) const { return offsets_[player] + action; }
  int value(int player) const { return num_strategies_ + player; }
  bool is_value(int var) const { return var >= num_strategies_; }
  // (player, action) of a strategy var; (player, -1) of a value var.
  std::pair<int, int> owner(int var) const;

  int num_strategies() const { return num_strategies_; }
  int num_players() const { return num_players_; }
  int total() const { return num_strategies_ + num_players_; }

 private:
  std::vector<int> offsets_;
  int num_strategies_ = 0;
  int num_players_ = 0;
};

// Strategy entries in [0,1] (pinned to 1 for single-action players), value
// variables on [min u_i, max u_i].
Box root_box(const Game& g);

// lo <= hi everywhere and, per player, sum lo <= 1 <= sum hi.
bool box_consistent(const Game& g, const VarIndex& vars, const Box& box);

// One inequality of a bilinear envelope, as coefficients on (w, x, y).
struct EnvelopeRow {
  double w = 0.0, x = 0.0, y = 0.0;
  LinearProgram::Sense sense = LinearProgram::Sense::LE;
  double rhs = 0.0;
};

// The four standard convex/concave hull inequalities of w = x*y over a box.
std::array<EnvelopeRow, 4> mccormick_rows(Interval xb, Interval yb);

// Node-level linear relaxation of the penalized program. Auxiliary columns
// materialize the partial products of a fixed-player-order prefix tree plus
// the strategy*value bilinears; every product step carries four envelope
// rows. Any feasible point of the box extends to an LP point with the same
// penalty value.
struct Relaxation {
  LinearProgram lp;
  std::vector<int> col_of_var;  // VarIndex -> lp column
  int penalty_col = -1;
  bool infeasible_box = false;

  // Bilinear steps for branching scores: w relaxes x*y; origins list the
  // branchable variables underlying each factor.
  struct Step {
    int w_col, x_col, y_col;
    std::vector<int> x_orig;
    int y_orig;
  };
  std::vector<Step> steps;
};

Relaxation build_relaxation(const Game& g, const VarIndex& vars, const Box& box);

struct TightenOptions {
  bool strategies_only = true;  // default: strategy variables only
  // Extra row penalty <= cap when >= 0. Capped tightening preserves every
  // point whose penalty does not exceed the cap (in particular all optima
  // when cap >= incumbent penalty); uncapped tightening preserves every
  // feasible point of the box.
  double penalty_cap = -1.0;
  SimplexOptions lp;
};

struct TightenResult {
  Box box;
  bool infeasible = false;
  long lp_solves = 0;
};

TightenResult tighten_bounds(const Game& g, const VarIndex& vars, const Box& box,
                             const TightenOptions& opt = {});

}  // namespace nashbnb
