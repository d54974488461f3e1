#include "nashbnb/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace nashbnb {

Interval interval_mul(Interval a, Interval b) {
  double c1 = a.lo * b.lo, c2 = a.lo * b.hi, c3 = a.hi * b.lo, c4 = a.hi * b.hi;
  return Interval{std::min({c1, c2, c3, c4}), std::max({c1, c2, c3, c4})};
}

VarIndex::VarIndex(const Game& g) : num_players_(g.num_players()) {
  offsets_.resize(num_players_);
  for (int i = 0; i < num_players_; ++i) {
    offsets_[i] = num_strategies_;
    num_strategies_ += g.num_actions(i);
  }
}

std::pair<int, int> VarIndex::owner(int var) const {
  if (var >= num_strategies_) return {var - num_strategies_, -1};
  int player = 0;
  while (player + 1 < num_players_ && offsets_[player + 1] <= var) ++player;
  return {player, var - offsets_[player]};
}

Box root_box(const Game& g) {
  VarIndex vars(g);
  Box box(vars.total());
  for (int i = 0; i < g.num_players(); ++i) {
    for (int a = 0; a < g.num_actions(i); ++a) {
      // A single-action player always plays its only action.
      box[vars.strategy(i, a)] = g.num_actions(i) == 1 ? Interval{1.0, 1.0}
                                                       : Interval{0.0, 1.0};
    }
    box[vars.value(i)] = Interval{g.min_utility(i), g.max_utility(i)};
  }
  return box;
}

bool box_consistent(const Game& g, const VarIndex& vars, const Box& box) {
  if (static_cast<int>(box.size()) != vars.total()) return false;
  for (const Interval& iv : box)
    if (!(iv.lo <= iv.hi)) return false;
  for (int i = 0; i < g.num_players(); ++i) {
    double lo_sum = 0.0, hi_sum = 0.0;
    for (int a = 0; a < g.num_actions(i); ++a) {
      lo_sum += box[vars.strategy(i, a)].lo;
      hi_sum += box[vars.strategy(i, a)].hi;
    }
    if (lo_sum > 1.0 + 1e-12 || hi_sum < 1.0 - 1e-12) return false;
  }
  return true;
}

std::array<EnvelopeRow, 4> mccormick_rows(Interval xb, Interval yb) {
  if (xb.lo > xb.hi || yb.lo > yb.hi)
    throw std::invalid_argument("empty interval in envelope construction");
  using Sense = LinearProgram::Sense;
  std::array<EnvelopeRow, 4> rows;
  // w >= xl*y + yl*x - xl*yl
  rows[0] = {1.0, -yb.lo, -xb.lo, Sense::GE, -xb.lo * yb.lo};
  // w >= xu*y + yu*x - xu*yu
  rows[1] = {1.0, -yb.hi, -xb.hi, Sense::GE, -xb.hi * yb.hi};
  // w <= xu*y + yl*x - xu*yl
  rows[2] = {1.0, -yb.lo, -xb.hi, Sense::LE, -xb.hi * yb.lo};
  // w <= xl*y + yu*x - xl*yu
  rows[3] = {1.0, -yb.hi, -xb.lo, Sense::LE, -xb.lo * yb.hi};
  return rows;
}

namespace {

// Enumeration of opponent profiles for one player, lowest player fastest.
struct ReducedSpace {
  std::vector<int> players;  // everyone except the fixed player
  std::vector<long> strides;
  long size = 1;

  ReducedSpace(const Game& g, int skip) {
    for (int j = 0; j < g.num_players(); ++j) {
      if (j == skip) continue;
      players.push_back(j);
      strides.push_back(size);
      size *= g.num_actions(j);
    }
  }
};

class RelaxationBuilder {
 public:
  RelaxationBuilder(const Game& g, const VarIndex& vars, const Box& box)
      : g_(g), vars_(vars), box_(box) {}

  Relaxation build() {
    Relaxation rel;
    if (!box_consistent(g_, vars_, box_)) {
      rel.infeasible_box = true;
      return rel;
    }
    rel_ = &rel;
    LinearProgram& lp = rel.lp;

    rel.col_of_var.resize(vars_.total());
    for (int i = 0; i < g_.num_players(); ++i)
      for (int a = 0; a < g_.num_actions(i); ++a) {
        int var = vars_.strategy(i, a);
        Interval iv = box_[var];
        rel.col_of_var[var] =
            lp.add_variable(std::max(0.0, iv.lo), std::min(1.0, iv.hi), 0.0,
                            "d" + std::to_string(i) + "_" + std::to_string(a));
      }
    for (int i = 0; i < g_.num_players(); ++i) {
      int var = vars_.value(i);
      rel.col_of_var[var] = lp.add_variable(box_[var].lo, box_[var].hi, 0.0,
                                            "v" + std::to_string(i));
    }
    double cap = 0.0;
    for (int i = 0; i < g_.num_players(); ++i)
      cap = std::max(cap, g_.max_utility(i) - g_.min_utility(i));
    rel.penalty_col = lp.add_variable(0.0, cap, 1.0, "pen");

    // Simplex rows.
    for (int i = 0; i < g_.num_players(); ++i) {
      std::vector<std::pair<int, double>> row;
      for (int a = 0; a < g_.num_actions(i); ++a)
        row.emplace_back(rel.col_of_var[vars_.strategy(i, a)], 1.0);
      lp.add_row(std::move(row), LinearProgram::Sense::EQ, 1.0);
    }

    // Prefix-tree root.
    nodes_.push_back(TreeNode{-1, Interval{1.0, 1.0}, {}});

    // Full-profile monomials, shared through the tree.
    const int n = g_.num_players();
    std::vector<int> full_col(g_.num_profiles());
    {
      std::vector<int> a(n, 0);
      for (long idx = 0; idx < g_.num_profiles(); ++idx) {
        int node = 0;
        for (int j = 0; j < n; ++j) node = extend(node, j, a[j]);
        full_col[idx] = nodes_[node].col;
        advance(a, g_.actions());
      }
    }

    // Opponent-profile monomials per player (prefixes shared with the full
    // chains wherever the skipped player comes last).
    std::vector<std::vector<int>> dev_col(n);
    for (int i = 0; i < n; ++i) {
      ReducedSpace red(g_, i);
      dev_col[i].resize(red.size);
      std::vector<int> a(red.players.size(), 0);
      std::vector<int> counts;
      for (int j : red.players) counts.push_back(g_.num_actions(j));
      for (long idx = 0; idx < red.size; ++idx) {
        int node = 0;
        for (size_t k = 0; k < red.players.size(); ++k)
          node = extend(node, red.players[k], a[k]);
        dev_col[i][idx] = nodes_[node].col;
        if (!counts.empty()) advance(a, counts);
      }
    }

    // Strategy*value bilinears.
    std::vector<std::vector<int>> t_col(n);
    for (int i = 0; i < n; ++i) {
      t_col[i].resize(g_.num_actions(i));
      for (int a = 0; a < g_.num_actions(i); ++a) {
        int svar = vars_.strategy(i, a);
        int vvar = vars_.value(i);
        Interval bounds = interval_mul(box_[svar], box_[vvar]);
        int w = lp.add_variable(bounds.lo, bounds.hi, 0.0,
                                "t" + std::to_string(i) + "_" + std::to_string(a));
        add_envelope(w, rel.col_of_var[svar], rel.col_of_var[vvar], box_[svar],
                     box_[vvar], {svar}, vvar);
        t_col[i][a] = w;
      }
    }

    // Stationarity: v_i - sum_{a_-i} u_i(a_i, a_-i) * dev >= 0, and the
    // penalty epigraph rows pen >= +-(t_{i,a} - sum_a u_i(a) * m(a)).
    for (int i = 0; i < n; ++i) {
      ReducedSpace red(g_, i);
      for (int ai = 0; ai < g_.num_actions(i); ++ai) {
        std::vector<std::pair<int, double>> stat;
        stat.emplace_back(rel.col_of_var[vars_.value(i)], 1.0);
        std::vector<std::pair<int, double>> pos, neg;
        pos.emplace_back(rel.penalty_col, 1.0);
        pos.emplace_back(t_col[i][ai], -1.0);
        neg.emplace_back(rel.penalty_col, 1.0);
        neg.emplace_back(t_col[i][ai], 1.0);

        std::vector<int> a(red.players.size(), 0);
        std::vector<int> counts;
        for (int j : red.players) counts.push_back(g_.num_actions(j));
        for (long idx = 0; idx < red.size; ++idx) {
          PureProfile full;
          full.actions.resize(n);
          full.actions[i] = ai;
          for (size_t k = 0; k < red.players.size(); ++k)
            full.actions[red.players[k]] = a[k];
          double u = g_.utility(i, g_.profile_index(full));
          if (u != 0.0) {
            stat.emplace_back(dev_col[i][idx], -u);
            pos.emplace_back(full_col[g_.profile_index(full)], u);
            neg.emplace_back(full_col[g_.profile_index(full)], -u);
          }
          if (!counts.empty()) advance(a, counts);
        }
        lp.add_row(std::move(stat), LinearProgram::Sense::GE, 0.0);
        lp.add_row(std::move(pos), LinearProgram::Sense::GE, 0.0);
        lp.add_row(std::move(neg), LinearProgram::Sense::GE, 0.0);
      }
    }
    return rel;
  }

 private:
  struct TreeNode {
    int col;  // lp column of this partial product (-1 for the root)
    Interval bounds;
    std::vector<int> members;  // strategy vars multiplied so far
  };

  static void advance(std::vector<int>& a, const std::vector<int>& counts) {
    for (size_t j = 0; j < a.size(); ++j) {
      if (++a[j] < counts[j]) return;
      a[j] = 0;
    }
  }

  // Child of `node` multiplied by strategy (player, action); created with
  // envelope rows on first use.
  int extend(int node, int player, int action) {
    auto key = std::make_tuple(node, player, action);
    auto it = children_.find(key);
    if (it != children_.end()) return it->second;

    int svar = vars_.strategy(player, action);
    int scol = rel_->col_of_var[svar];
    int child;
    if (node == 0) {
      child = static_cast<int>(nodes_.size());
      nodes_.push_back(TreeNode{scol, box_[svar], {svar}});
    } else {
      const TreeNode parent = nodes_[node];
      Interval bounds = interval_mul(parent.bounds, box_[svar]);
      std::string name = "w" + std::to_string(nodes_.size());
      int wcol = rel_->lp.add_variable(bounds.lo, bounds.hi, 0.0, name);
      add_envelope(wcol, parent.col, scol, parent.bounds, box_[svar], parent.members,
                   svar);
      std::vector<int> members = parent.members;
      members.push_back(svar);
      child = static_cast<int>(nodes_.size());
      nodes_.push_back(TreeNode{wcol, bounds, std::move(members)});
    }
    children_.emplace(key, child);
    return child;
  }

  void add_envelope(int w, int xcol, int ycol, Interval xb, Interval yb,
                    const std::vector<int>& x_orig, int y_orig) {
    for (const EnvelopeRow& e : mccormick_rows(xb, yb)) {
      rel_->lp.add_row({{w, e.w}, {xcol, e.x}, {ycol, e.y}}, e.sense, e.rhs);
    }
    rel_->steps.push_back(Relaxation::Step{w, xcol, ycol, x_orig, y_orig});
  }

  const Game& g_;
  const VarIndex& vars_;
  const Box& box_;
  Relaxation* rel_ = nullptr;
  std::vector<TreeNode> nodes_;
  std::map<std::tuple<int, int, int>, int> children_;
};

}  // namespace

Relaxation build_relaxation(const Game& g, const VarIndex& vars, const Box& box) {
  return RelaxationBuilder(g, vars, box).build();
}

TightenResult tighten_bounds(const Game& g, const VarIndex& vars, const Box& box,
                             const TightenOptions& opt) {
  TightenResult out;
  out.box = box;
  Relaxation rel = build_relaxation(g, vars, box);
  if (rel.infeasible_box) {
    out.infeasible = true;
    return out;
  }
  if (opt.penalty_cap >= 0.0)
    rel.lp.upper[rel.penalty_col] = std::min(rel.lp.upper[rel.penalty_col],
                                             opt.penalty_cap);

  int limit = opt.strategies_only ? vars.num_strategies() : vars.total();
  for (int var = 0; var < limit; ++var) {
    int col = rel.col_of_var[var];
    if (rel.lp.upper[col] - rel.lp.lower[col] < 1e-9) continue;
    for (double sign : {1.0, -1.0}) {
      std::fill(rel.lp.objective.begin(), rel.lp.objective.end(), 0.0);
      rel.lp.objective[col] = sign;
      LpSolution sol = solve_lp(rel.lp, opt.lp);
      ++out.lp_solves;
      if (sol.status == LpStatus::Infeasible) {
        out.infeasible = true;
        return out;
      }
      if (sol.status != LpStatus::Optimal) continue;  // keep the old bound
      if (sign > 0) {
        double lo = sol.objective - 1e-9;
        out.box[var].lo = std::max(out.box[var].lo, lo);
        rel.lp.lower[col] = std::max(rel.lp.lower[col], lo);
      } else {
        double hi = -sol.objective + 1e-9;
        out.box[var].hi = std::min(out.box[var].hi, hi);
        rel.lp.upper[col] = std::min(rel.lp.upper[col], hi);
      }
    }
    if (out.box[var].lo > out.box[var].hi) {
      // Numerical safety: collapse instead of crossing.
      double mid = 0.5 * (out.box[var].lo + out.box[var].hi);
      out.box[var].lo = out.box[var].hi = mid;
    }
  }
  return out;
}

}  // namespace nashbnb
