#include "nashbnb/sbnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <ostream>
#include <queue>
#include <thread>
#include <vector>

namespace nashbnb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFathomTol = 1e-9;
constexpr double kMinBranchWidth = 1e-7;
constexpr double kBoundSafety = 1e-10;  // subtracted from LP objectives

double prune_margin(const SolveConfig& cfg) { return std::max(cfg.gap_tol_abs, 1e-12); }

// Projection of clamped values onto {sum = 1} intersected with the box:
// shift all entries by a common lambda and re-clamp (monotone in lambda).
std::vector<double> box_simplex_project(std::vector<double> x, const std::vector<double>& lo,
                                        const std::vector<double>& hi) {
  double lambda_lo = -2.0, lambda_hi = 2.0;
  auto mass = [&](double lambda) {
    double s = 0.0;
    for (size_t a = 0; a < x.size(); ++a) s += std::clamp(x[a] + lambda, lo[a], hi[a]);
    return s;
  };
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lambda_lo + lambda_hi);
    (mass(mid) < 1.0 ? lambda_lo : lambda_hi) = mid;
  }
  double lambda = 0.5 * (lambda_lo + lambda_hi);
  for (size_t a = 0; a < x.size(); ++a) x[a] = std::clamp(x[a] + lambda, lo[a], hi[a]);
  return x;
}

// Snaps dust entries to exact zeros when that does not hurt the penalty;
// keeps integer witnesses clean for converted solutions.
CandidateSolution cleaned(const Game& g, CandidateSolution best) {
  for (double threshold : {1e-12, 1e-9, 1e-7, 1e-5}) {
    MixedProfile q = best.profile;
    bool changed = false;
    for (int i = 0; i < g.num_players(); ++i) {
      double sum = 0.0;
      for (double& x : q.probs[i]) {
        if (x <= threshold) {
          changed = changed || x != 0.0;
          x = 0.0;
        }
        sum += x;
      }
      if (sum <= 0.0) return best;
      for (double& x : q.probs[i]) x /= sum;
    }
    if (!changed) continue;
    std::vector<double> v = best_response_values(g, q);
    double pen = eval_penalty(g, q, v).penalty;
    if (pen <= std::max(best.penalty, 1e-15)) {
      best.profile = std::move(q);
      best.values = std::move(v);
      best.penalty = pen;
    }
  }
  return best;
}

struct HeapEntry {
  double bound;
  long id;
  size_t slot;  // index into the node store
  bool operator<(const HeapEntry& o) const {
    if (bound != o.bound) return bound > o.bound;  // min-heap on bound
    return id > o.id;                              // then oldest first
  }
};

class Driver {
 public:
  Driver(const Game& g, const SolveConfig& cfg)
      : g_(g), cfg_(cfg), vars_(g), start_(std::chrono::steady_clock::now()) {}

  SolveResult run() {
    incumbent_.profile = MixedProfile::uniform(g_.actions());
    incumbent_.values = best_response_values(g_, incumbent_.profile);
    incumbent_.penalty = eval_penalty(g_, incumbent_.profile, incumbent_.values).penalty;

    if (cfg_.warm_start) {
      LocalSearchConfig local = cfg_.local;
      local.seed = cfg_.seed;
      // The tree prunes once the incumbent is within the gap tolerance of
      // the zero optimum, so stage 1 aims below it.
      local.target_varpi = std::min(local.target_varpi, 0.5 * prune_margin(cfg_));
      if (cfg_.varpi_target >= 0)
        local.target_varpi = std::min(cfg_.varpi_target, cfg_.local.target_varpi);
      CandidateSolution warm = local_solve(g_, local);
      if (warm.penalty < incumbent_.penalty) incumbent_ = std::move(warm);
    }

    Box root = root_box(g_);
    if (!stop_requested()) {
      if (cfg_.root_tighten) {
        TightenOptions topt;
        topt.penalty_cap = incumbent_.penalty + 1e-9;
        TightenResult tightened = tighten_bounds(g_, vars_, root, topt);
        lp_solves_ += tightened.lp_solves;
        if (!tightened.infeasible) root = std::move(tightened.box);
      }
      push_node(Node{std::move(root), -kInf, 0, 0});
      run_workers();
    }

    SolveResult out;
    out.solution = cleaned(g_, incumbent_);
    out.status = status_;
    out.certified_epsilon = epsilon_bound(out.solution.penalty, g_);
    out.measured_epsilon = exploitability(g_, out.solution.profile).epsilon;
    out.stats.nodes = nodes_processed_;
    out.stats.lp_solves = lp_solves_;
    // The objective is a max of absolute values, so 0 is always a valid
    // floor; the tree bound can only raise it.
    double tree_lb = std::min(open_lower(), closed_lower_);
    double lb = tree_lb == kInf ? 0.0 : std::max(0.0, tree_lb);
    out.stats.global_lower = std::min(lb, out.solution.penalty);
    out.stats.wall_time_s = elapsed();
    return out;
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  // Early-termination and limit checks against *committed* state.
  bool stop_requested() {
    if (cfg_.varpi_target >= 0 && incumbent_.penalty <= cfg_.varpi_target) {
      status_ = SolveStatus::EpsilonReached;
      return true;
    }
    if (cfg_.node_limit > 0 && nodes_processed_ >= cfg_.node_limit) {
      status_ = SolveStatus::Limit;
      return true;
    }
    if (cfg_.time_limit_s > 0 && elapsed() >= cfg_.time_limit_s) {
      status_ = SolveStatus::Limit;
      return true;
    }
    return false;
  }

  double open_lower() const {
    double lo = kInf;
    if (!heap_.empty()) lo = heap_.top().bound;
    for (double b : inflight_)
      lo = std::min(lo, b);
    return lo;
  }

  double global_lower_unlocked() const {
    return std::min({open_lower(), closed_lower_, incumbent_.penalty});
  }

  void push_node(Node n) {
    n.id = next_id_++;
    size_t slot;
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
      store_[slot] = std::move(n);
    } else {
      slot = store_.size();
      store_.push_back(std::move(n));
    }
    heap_.push(HeapEntry{store_[slot].lower_bound, store_[slot].id, slot});
  }

  void run_workers() {
    int workers = cfg_.deterministic ? 1 : std::max(1, cfg_.workers);
    inflight_.assign(workers, kInf);
    if (workers == 1) {
      worker_loop(0);
      return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back([this, w] { worker_loop(w); });
    for (auto& t : pool) t.join();
  }

  void worker_loop(int worker) {
    std::unique_lock<std::mutex> lock(mu_);
    std::vector<Node> plunge_stack;
    int plunge_remaining = 0;

    while (true) {
      if (done_ || stop_requested()) {
        done_ = true;
        cv_.notify_all();
        return;
      }

      Node node;
      bool have = false;
      if (!plunge_stack.empty()) {
        node = std::move(plunge_stack.back());
        plunge_stack.pop_back();
        have = true;
      } else {
        plunge_remaining = cfg_.plunge_depth;
        while (!heap_.empty()) {
          HeapEntry top = heap_.top();
          heap_.pop();
          Node& stored = store_[top.slot];
          free_slots_.push_back(top.slot);
          if (stored.lower_bound >= incumbent_.penalty - prune_margin(cfg_)) {
            closed_lower_ = std::min(closed_lower_, stored.lower_bound);
            continue;  // pruned on pop
          }
          node = std::move(stored);
          have = true;
          break;
        }
      }

      if (!have) {
        if (busy_ == 0) {
          // Tree exhausted: the closed leaves bound the optimum.
          if (incumbent_.penalty - global_lower_unlocked() <= prune_margin(cfg_))
            status_ = SolveStatus::Optimal;
          else
            status_ = SolveStatus::Limit;
          done_ = true;
          cv_.notify_all();
          return;
        }
        cv_.wait(lock);
        continue;
      }

      ++busy_;
      inflight_[worker] = node.lower_bound == -kInf ? 0.0 : node.lower_bound;
      lock.unlock();

      ProcessOutcome outcome = process(node);

      lock.lock();
      --busy_;
      inflight_[worker] = kInf;
      commit(node, outcome, plunge_stack, plunge_remaining);
      if (plunge_remaining > 0) --plunge_remaining;
      cv_.notify_all();

      // Optimality by gap closure against committed state.
      if (!done_ && incumbent_.penalty - global_lower_unlocked() <= prune_margin(cfg_) &&
          plunge_stack.empty() && busy_ == 0) {
        status_ = SolveStatus::Optimal;
        done_ = true;
        cv_.notify_all();
        return;
      }
    }
  }

  struct ProcessOutcome {
    double bound = -kInf;
    bool close = false;            // prune/fathom/infeasible: no children
    bool infeasible = false;       // no bound contribution at all
    CandidateSolution candidate;   // node-level projected (and polished) point
    bool has_candidate = false;
    std::vector<Node> children;
    BranchChoice branch;
    double branch_value = 0.0;     // LP value of the branch variable
  };

  ProcessOutcome process(const Node& node) {
    ProcessOutcome out;
    Relaxation rel = build_relaxation(g_, vars_, node.box);
    if (rel.infeasible_box) {
      out.close = out.infeasible = true;
      return out;
    }
    LpSolution lp = solve_lp(rel.lp);
    {
      std::lock_guard<std::mutex> guard(stats_mu_);
      ++lp_solves_;
    }
    if (lp.status == LpStatus::Infeasible) {
      out.close = out.infeasible = true;
      return out;
    }

    if (lp.status == LpStatus::Optimal) {
      out.bound = std::max(node.lower_bound, lp.objective - kBoundSafety);
      out.candidate = project_lp_point(g_, vars_, node.box, rel, lp.x);
      out.has_candidate = true;
    } else {
      // Unresolved relaxation: keep the inherited bound and branch.
      out.bound = node.lower_bound;
    }

    BranchChoice choice = lp.status == LpStatus::Optimal
                              ? select_branch_variable(g_, vars_, node, rel, lp.x)
                              : widest_choice(node);
    if (choice.var < 0) {
      out.close = true;  // nothing left to split; bound stands for the region
      return out;
    }
    out.branch = choice;
    out.branch_value = lp.status == LpStatus::Optimal ? lp.x[rel.col_of_var[choice.var]]
                                                      : choice.split;

    Node down{node.box, out.bound, node.depth + 1, 0};
    down.box[choice.var].hi = choice.split;
    Node up{node.box, out.bound, node.depth + 1, 0};
    up.box[choice.var].lo = choice.split;
    for (Node* child : {&down, &up})
      if (box_consistent(g_, vars_, child->box)) out.children.push_back(std::move(*child));
    if (out.children.empty()) out.close = true;
    return out;
  }

  BranchChoice widest_choice(const Node& node) const {
    BranchChoice c;
    double best = kMinBranchWidth;
    for (int var = 0; var < vars_.total(); ++var) {
      double w = node.box[var].width();
      if (w > best) {
        best = w;
        c.var = var;
      }
    }
    if (c.var >= 0) {
      const Interval& iv = node.box[c.var];
      c.split = 0.5 * (iv.lo + iv.hi);
    }
    return c;
  }

  // Incumbent updates and child dispatch under the state lock.
  void commit(const Node& node, ProcessOutcome& out, std::vector<Node>& plunge_stack,
              int plunge_remaining) {
    ++nodes_processed_;

    if (out.has_candidate) {
      bool improved = out.candidate.penalty < incumbent_.penalty;
      bool due = cfg_.polish_period > 0 && nodes_processed_ % cfg_.polish_period == 0;
      if ((improved || due || node.depth == 0) && cfg_.polish_incumbent) {
        CandidateSolution polished =
            local_polish(g_, out.candidate.profile, 160, 1e-13);
        if (polished.penalty < out.candidate.penalty) out.candidate = std::move(polished);
      }
      if (out.candidate.penalty < incumbent_.penalty) incumbent_ = out.candidate;
    }

    double margin = prune_margin(cfg_);
    bool close = out.close;
    if (!close && out.bound >= incumbent_.penalty - margin) close = true;  // pruned
    if (!close && out.has_candidate && out.bound >= out.candidate.penalty - kFathomTol)
      close = true;  // fathomed: the projection attains the node bound

    if (close) {
      if (!out.infeasible) closed_lower_ = std::min(closed_lower_, out.bound);
    } else {
      // Plunge into the child on the relaxation point's side of the split.
      bool down_first = out.branch_value <= out.branch.split;
      std::vector<Node> ordered;
      for (Node& child : out.children) ordered.push_back(std::move(child));
      if (ordered.size() == 2 && !down_first) std::swap(ordered[0], ordered[1]);
      for (size_t k = 0; k < ordered.size(); ++k) {
        if (k == 0 && plunge_remaining > 0) {
          ordered[k].id = next_id_++;
          plunge_stack.push_back(std::move(ordered[k]));
        } else {
          push_node(std::move(ordered[k]));
        }
      }
    }

    if (cfg_.node_log) {
      double gap = incumbent_.penalty - global_lower_unlocked();
      *cfg_.node_log << node.id << '\t' << node.depth << '\t' << out.bound << '\t'
                     << incumbent_.penalty << '\t' << gap << '\n';
    }
  }

  const Game& g_;
  const SolveConfig& cfg_;
  VarIndex vars_;
  std::chrono::steady_clock::time_point start_;

  std::mutex mu_;
  std::mutex stats_mu_;
  std::condition_variable cv_;
  std::priority_queue<HeapEntry> heap_;
  std::vector<Node> store_;
  std::vector<size_t> free_slots_;
  std::vector<double> inflight_;
  CandidateSolution incumbent_;
  double closed_lower_ = kInf;
  long nodes_processed_ = 0;
  long lp_solves_ = 0;
  long next_id_ = 1;
  int busy_ = 0;
  bool done_ = false;
  SolveStatus status_ = SolveStatus::Limit;
};

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::EpsilonReached: return "epsilon_reached";
    case SolveStatus::Limit: return "limit";
  }
  return "unknown";
}

CandidateSolution project_lp_point(const Game& g, const VarIndex& vars, const Box& box,
                                   const Relaxation& rel, const std::vector<double>& x) {
  MixedProfile p;
  p.probs.resize(g.num_players());
  for (int i = 0; i < g.num_players(); ++i) {
    int m = g.num_actions(i);
    std::vector<double> vals(m), lo(m), hi(m);
    for (int a = 0; a < m; ++a) {
      int var = vars.strategy(i, a);
      lo[a] = std::max(0.0, box[var].lo);
      hi[a] = std::min(1.0, box[var].hi);
      vals[a] = std::clamp(x[rel.col_of_var[var]], lo[a], hi[a]);
    }
    std::vector<double> proj = box_simplex_project(std::move(vals), lo, hi);
    double sum = 0.0;
    for (double v : proj) sum += v;
    for (double& v : proj) v /= sum;
    p.probs[i] = std::move(proj);
  }
  CandidateSolution c;
  c.values = best_response_values(g, p);
  c.penalty = eval_penalty(g, p, c.values).penalty;
  c.profile = std::move(p);
  return c;
}

BranchChoice select_branch_variable(const Game&, const VarIndex& vars, const Node& node,
                                    const Relaxation& rel, const std::vector<double>& x) {
  std::vector<double> score(vars.total(), 0.0);
  for (const Relaxation::Step& step : rel.steps) {
    double violation = std::abs(x[step.w_col] - x[step.x_col] * x[step.y_col]);
    if (violation <= 1e-12) continue;
    double total_width = node.box[step.y_orig].width();
    for (int var : step.x_orig) total_width += node.box[var].width();
    if (total_width <= 0) continue;
    for (int var : step.x_orig)
      score[var] += violation * node.box[var].width() / total_width;
    score[step.y_orig] += violation * node.box[step.y_orig].width() / total_width;
  }

  BranchChoice choice;
  double best_score = 1e-12, best_width = 0.0;
  for (int var = 0; var < vars.total(); ++var) {
    double w = node.box[var].width();
    if (w < kMinBranchWidth) continue;
    if (score[var] > best_score ||
        (score[var] == best_score && choice.var >= 0 && w > best_width)) {
      best_score = score[var];
      best_width = w;
      choice.var = var;
    }
  }
  if (choice.var < 0) {
    // All envelopes tight at the point: fall back to the widest interval.
    for (int var = 0; var < vars.total(); ++var) {
      double w = node.box[var].width();
      if (w >= kMinBranchWidth && w > best_width) {
        best_width = w;
        choice.var = var;
      }
    }
  }
  if (choice.var < 0) return choice;

  const Interval& iv = node.box[choice.var];
  double value = x[rel.col_of_var[choice.var]];
  double margin = 0.2 * iv.width();
  choice.split = std::clamp(value, iv.lo + margin, iv.hi - margin);
  return choice;
}

SolveResult solve(const Game& g, const SolveConfig& cfg) {
  Driver driver(g, cfg);
  SolveResult result = driver.run();
  if (cfg.deterministic) result.stats.wall_time_s = 0.0;
  return result;
}

}  // namespace nashbnb
