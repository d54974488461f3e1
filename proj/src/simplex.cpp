#include "nashbnb/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nashbnb {

int LinearProgram::add_variable(double lo, double hi, double obj, std::string name) {
  if (!(std::isfinite(lo) && std::isfinite(hi)))
    throw std::invalid_argument("variable bounds must be finite");
  if (lo > hi) throw std::invalid_argument("variable lower bound exceeds upper bound");
  lower.push_back(lo);
  upper.push_back(hi);
  objective.push_back(obj);
  names.push_back(std::move(name));
  return num_vars() - 1;
}

void LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, Sense sense,
                            double rhs) {
  for (auto& [col, v] : coeffs) {
    if (col < 0 || col >= num_vars()) throw std::invalid_argument("row references unknown column");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite row coefficient");
  }
  if (!std::isfinite(rhs)) throw std::invalid_argument("non-finite right-hand side");
  rows.push_back(Row{std::move(coeffs), sense, rhs});
}

double LinearProgram::max_row_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (const Row& r : rows) {
    double lhs = 0.0;
    for (auto [col, v] : r.coeffs) lhs += v * x[col];
    switch (r.sense) {
      case Sense::LE: worst = std::max(worst, lhs - r.rhs); break;
      case Sense::GE: worst = std::max(worst, r.rhs - lhs); break;
      case Sense::EQ: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
    }
  }
  return worst;
}

namespace {

enum VarState : unsigned char { kAtLower, kAtUpper, kBasic };

struct SingularBasis {};

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), m_(static_cast<int>(lp.rows.size())), n_(lp.num_vars()) {
    ncols_ = n_ + 2 * m_;  // structural | slack | artificial
    lo_.resize(ncols_);
    hi_.resize(ncols_);
    dense_.assign(static_cast<size_t>(m_) * ncols_, 0.0);
    rhs_.resize(m_);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp.lower[j];
      hi_[j] = lp.upper[j];
    }
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp.rows[i];
      double mag = std::abs(row.rhs);
      for (auto [col, v] : row.coeffs) {
        a(i, col) += v;
        mag += std::abs(v) * std::max(std::abs(lo_[col]), std::abs(hi_[col]));
      }
      a(i, slack(i)) = 1.0;
      double big = 2.0 * mag + 1.0;
      switch (row.sense) {
        case LinearProgram::Sense::LE: lo_[slack(i)] = 0.0; hi_[slack(i)] = big; break;
        case LinearProgram::Sense::GE: lo_[slack(i)] = -big; hi_[slack(i)] = 0.0; break;
        case LinearProgram::Sense::EQ: lo_[slack(i)] = 0.0; hi_[slack(i)] = 0.0; break;
      }
      a(i, art(i)) = 1.0;
      lo_[art(i)] = hi_[art(i)] = 0.0;  // widened per-row if phase 1 needs it
      rhs_[i] = row.rhs;
    }
  }

  LpSolution run() {
    // A numerically singular basis restarts the solve from the slack basis
    // under Bland's rule; a second failure reports an unresolved node.
    long iters = 0;
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        return solve_once(iters);
      } catch (const SingularBasis&) {
        force_bland_ = true;
        opt_.refactor_every = std::max<long>(16, opt_.refactor_every / 4);
      }
    }
    LpSolution sol;
    sol.iterations = iters;
    sol.status = LpStatus::IterationLimit;
    return sol;
  }

 private:
  LpSolution solve_once(long& iters) {
    LpSolution sol;
    init_basis();
    long budget = opt_.max_iterations > 0 ? opt_.max_iterations
                                          : 200 + 40L * (m_ + ncols_);

    if (needs_phase1_) {
      if (!iterate(phase1_cost_, budget, &iters)) {
        sol.iterations = iters;
        sol.status = LpStatus::IterationLimit;
        return sol;
      }
      double infeas = phase_objective(phase1_cost_);
      if (infeas > 1e-7) {
        sol.iterations = iters;
        sol.status = LpStatus::Infeasible;
        sol.farkas = phase1_duals();
        return sol;
      }
      for (int i = 0; i < m_; ++i) lo_[art(i)] = hi_[art(i)] = 0.0;
      drive_out_artificials();
    }

    std::vector<double> cost(ncols_, 0.0);
    for (int j = 0; j < n_; ++j) cost[j] = lp_.objective[j];
    if (!iterate(cost, budget, &iters)) {
      sol.iterations = iters;
      sol.status = LpStatus::IterationLimit;
      return sol;
    }
    sol.iterations = iters;
    refactorize();  // clean values before extraction

    sol.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) sol.x[j] = value_[j];
    // Nonbasic variables sit exactly on bounds; clamp basic roundoff dust.
    for (int j = 0; j < n_; ++j) sol.x[j] = std::clamp(sol.x[j], lo_[j], hi_[j]);
    if (lp_.max_row_violation(sol.x) > 10 * opt_.feas_tol)
      throw SingularBasis{};  // numerically unusable optimum; retry under Bland
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective += lp_.objective[j] * sol.x[j];
    sol.status = LpStatus::Optimal;
    return sol;
  }

  double& a(int i, int j) { return dense_[static_cast<size_t>(i) * ncols_ + j]; }
  double a(int i, int j) const { return dense_[static_cast<size_t>(i) * ncols_ + j]; }
  double& t(int i, int j) { return tab_[static_cast<size_t>(i) * ncols_ + j]; }
  double t(int i, int j) const { return tab_[static_cast<size_t>(i) * ncols_ + j]; }
  int slack(int i) const { return n_ + i; }
  int art(int i) const { return n_ + m_ + i; }

  void init_basis() {
    state_.assign(ncols_, kAtLower);
    value_.assign(ncols_, 0.0);
    basis_.resize(m_);
    in_basis_row_.assign(ncols_, -1);
    phase1_cost_.assign(ncols_, 0.0);
    needs_phase1_ = false;

    // Nonbasic structural variables start at the bound of smaller magnitude.
    for (int j = 0; j < n_; ++j) {
      state_[j] = std::abs(lo_[j]) <= std::abs(hi_[j]) ? kAtLower : kAtUpper;
      value_[j] = state_[j] == kAtLower ? lo_[j] : hi_[j];
    }
    for (int i = 0; i < m_; ++i) {
      double act = 0.0;
      for (int j = 0; j < n_; ++j)
        if (a(i, j) != 0.0) act += a(i, j) * value_[j];
      double s_req = rhs_[i] - act;
      int sj = slack(i), aj = art(i);
      if (s_req >= lo_[sj] && s_req <= hi_[sj]) {
        basis_[i] = sj;
        value_[sj] = s_req;
        state_[sj] = kBasic;
        state_[aj] = kAtLower;
        lo_[aj] = hi_[aj] = 0.0;  // may be stale after a restarted attempt
      } else {
        double pin = s_req < lo_[sj] ? lo_[sj] : hi_[sj];
        state_[sj] = s_req < lo_[sj] ? kAtLower : kAtUpper;
        value_[sj] = pin;
        double resid = s_req - pin;
        if (resid > 0) {
          lo_[aj] = 0.0;
          hi_[aj] = std::abs(resid) * 2 + 1;
          phase1_cost_[aj] = 1.0;
        } else {
          lo_[aj] = -(std::abs(resid) * 2 + 1);
          hi_[aj] = 0.0;
          phase1_cost_[aj] = -1.0;
        }
        basis_[i] = aj;
        value_[aj] = resid;
        state_[aj] = kBasic;
        needs_phase1_ = true;
      }
      in_basis_row_[basis_[i]] = i;
    }
    refactorize();
  }

  // Rebuilds tab_ = B^{-1} [A S Z] and basic values from the original data.
  void refactorize() {
    // Gauss-Jordan on [B | A S Z]; binv implicitly accumulated in the work
    // copy because slack/artificial columns of non-basic rows stay intact.
    std::vector<double> binv(static_cast<size_t>(m_) * m_, 0.0);
    std::vector<double> bmat(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv[static_cast<size_t>(i) * m_ + i] = 1.0;
    for (int k = 0; k < m_; ++k)
      for (int i = 0; i < m_; ++i) bmat[static_cast<size_t>(i) * m_ + k] = a(i, basis_[k]);

    for (int k = 0; k < m_; ++k) {
      int piv = -1;
      double best = 1e-12;
      for (int i = k; i < m_; ++i) {
        double cand = std::abs(bmat[static_cast<size_t>(i) * m_ + k]);
        if (cand > best) {
          best = cand;
          piv = i;
        }
      }
      if (piv < 0) throw SingularBasis{};
      if (piv != k) {
        for (int j = 0; j < m_; ++j) {
          std::swap(bmat[static_cast<size_t>(piv) * m_ + j], bmat[static_cast<size_t>(k) * m_ + j]);
          std::swap(binv[static_cast<size_t>(piv) * m_ + j], binv[static_cast<size_t>(k) * m_ + j]);
        }
      }
      double inv = 1.0 / bmat[static_cast<size_t>(k) * m_ + k];
      for (int j = 0; j < m_; ++j) {
        bmat[static_cast<size_t>(k) * m_ + j] *= inv;
        binv[static_cast<size_t>(k) * m_ + j] *= inv;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == k) continue;
        double f = bmat[static_cast<size_t>(i) * m_ + k];
        if (f == 0.0) continue;
        for (int j = 0; j < m_; ++j) {
          bmat[static_cast<size_t>(i) * m_ + j] -= f * bmat[static_cast<size_t>(k) * m_ + j];
          binv[static_cast<size_t>(i) * m_ + j] -= f * binv[static_cast<size_t>(k) * m_ + j];
        }
      }
    }

    tab_.assign(static_cast<size_t>(m_) * ncols_, 0.0);
    for (int i = 0; i < m_; ++i) {
      for (int k = 0; k < m_; ++k) {
        double f = binv[static_cast<size_t>(i) * m_ + k];
        if (f == 0.0) continue;
        const double* arow = &dense_[static_cast<size_t>(k) * ncols_];
        double* trow = &tab_[static_cast<size_t>(i) * ncols_];
        for (int j = 0; j < ncols_; ++j) trow[j] += f * arow[j];
      }
    }
    recompute_basic_values();
    pivots_since_refactor_ = 0;
  }

  void recompute_basic_values() {
    // x_B = B^{-1}(b - N x_N); tableau slack columns hold B^{-1}.
    for (int i = 0; i < m_; ++i) {
      double v = 0.0;
      for (int r = 0; r < m_; ++r) v += t(i, slack(r)) * rhs_[r];
      for (int j = 0; j < ncols_; ++j) {
        if (state_[j] == kBasic || value_[j] == 0.0) continue;
        v -= t(i, j) * value_[j];
      }
      value_[basis_[i]] = v;
    }
  }

  double phase_objective(const std::vector<double>& cost) const {
    double obj = 0.0;
    for (int j = 0; j < ncols_; ++j)
      if (cost[j] != 0.0) obj += cost[j] * value_[j];
    return obj;
  }

  std::vector<double> phase1_duals() const {
    std::vector<double> y(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      double v = 0.0;
      for (int i = 0; i < m_; ++i) v += phase1_cost_[basis_[i]] * t(i, slack(r));
      y[r] = v;
    }
    return y;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_ + m_) continue;
      int best_j = -1;
      double best = 1e-9;
      for (int j = 0; j < n_ + m_; ++j) {
        if (state_[j] == kBasic) continue;
        if (lo_[j] == hi_[j]) continue;
        double cand = std::abs(t(i, j));
        if (cand > best) {
          best = cand;
          best_j = j;
        }
      }
      if (best_j >= 0) pivot(i, best_j, kAtLower);
      // else: redundant row; the artificial stays basic pinned at 0.
    }
    refactorize();
  }

  // Core loop for one phase. Returns false on iteration exhaustion.
  bool iterate(const std::vector<double>& cost, long budget, long* iter_total) {
    long no_progress = 0;
    bool bland = force_bland_;
    double best_obj = std::numeric_limits<double>::infinity();
    const long bland_trigger = 5L * (m_ + ncols_);

    for (long iter = 0; iter < budget; ++iter) {
      ++*iter_total;
      if (pivots_since_refactor_ >= opt_.refactor_every) refactorize();

      double obj = phase_objective(cost);
      if (obj < best_obj - 1e-12) {
        best_obj = obj;
        no_progress = 0;
        bland = force_bland_;
      } else if (++no_progress > bland_trigger) {
        bland = true;
      }

      // Pricing: reduced cost d_j = c_j - c_B' B^{-1} A_j.
      int enter = -1;
      double best_score = opt_.opt_tol;
      for (int j = 0; j < ncols_; ++j) {
        if (state_[j] == kBasic || lo_[j] == hi_[j]) continue;
        double d = cost[j];
        for (int i = 0; i < m_; ++i) {
          double cbi = cost[basis_[i]];
          if (cbi != 0.0) d -= cbi * t(i, j);
        }
        double score = state_[j] == kAtLower ? -d : d;
        if (score > best_score) {
          best_score = score;
          enter = j;
          if (bland) break;  // first improving column by index
        }
      }
      if (enter < 0) return true;  // optimal for this phase

      int dir = state_[enter] == kAtLower ? 1 : -1;

      // Two-pass ratio test: the first pass bounds the step with bounds
      // relaxed by the feasibility tolerance, the second picks the largest
      // pivot among candidates inside that step. Under Bland's rule the
      // strict lexicographic test is used instead.
      const double bound_range = hi_[enter] - lo_[enter];
      double limit = bound_range;
      int leave_row = -1;
      double leave_pivot = 0.0;
      VarState leave_to = kAtLower;

      auto room_of = [&](int i, double coef, VarState* target) {
        double delta = -dir * coef;  // movement of basic i per unit step
        int b = basis_[i];
        double room;
        if (delta > 0) {
          room = (hi_[b] - value_[b]) / delta;
          *target = kAtUpper;
        } else {
          room = (lo_[b] - value_[b]) / delta;
          *target = kAtLower;
        }
        return std::max(room, 0.0);
      };

      if (bland) {
        for (int i = 0; i < m_; ++i) {
          double coef = t(i, enter);
          if (std::abs(coef) < 1e-10) continue;
          VarState target;
          double room = room_of(i, coef, &target);
          bool better = room < limit - 1e-12 ||
                        (room <= limit + 1e-12 &&
                         (leave_row < 0 || basis_[i] < basis_[leave_row]));
          if (better) {
            limit = std::min(limit, room);
            leave_row = i;
            leave_pivot = coef;
            leave_to = target;
          }
        }
      } else {
        double step_cap = bound_range;
        for (int i = 0; i < m_; ++i) {
          double coef = t(i, enter);
          if (std::abs(coef) < 1e-10) continue;
          VarState target;
          double relaxed = room_of(i, coef, &target) + opt_.feas_tol / std::abs(coef);
          step_cap = std::min(step_cap, relaxed);
        }
        for (int i = 0; i < m_; ++i) {
          double coef = t(i, enter);
          if (std::abs(coef) < 1e-10) continue;
          VarState target;
          double room = room_of(i, coef, &target);
          if (room > step_cap) continue;
          if (leave_row < 0 || std::abs(coef) > std::abs(leave_pivot)) {
            leave_row = i;
            leave_pivot = coef;
            leave_to = target;
            limit = room;
          }
        }
        if (leave_row < 0) limit = bound_range;
      }

      double step = dir * limit;
      for (int i = 0; i < m_; ++i) {
        double coef = t(i, enter);
        if (coef != 0.0) value_[basis_[i]] -= coef * step;
      }

      if (leave_row < 0) {
        // Bound flip: entering runs to its opposite bound.
        state_[enter] = state_[enter] == kAtLower ? kAtUpper : kAtLower;
        value_[enter] = state_[enter] == kAtLower ? lo_[enter] : hi_[enter];
        continue;
      }

      double enter_value = value_[enter] + step;
      pivot(leave_row, enter, leave_to);
      value_[enter] = enter_value;
    }
    return false;
  }

  // Gauss-Jordan exchange; the leaving variable is pinned at new_state.
  void pivot(int row, int enter, VarState new_state) {
    double inv = 1.0 / t(row, enter);
    double* prow = &tab_[static_cast<size_t>(row) * ncols_];
    for (int j = 0; j < ncols_; ++j) prow[j] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      double f = t(i, enter);
      if (f == 0.0) continue;
      double* irow = &tab_[static_cast<size_t>(i) * ncols_];
      for (int j = 0; j < ncols_; ++j) irow[j] -= f * prow[j];
    }
    int leaving = basis_[row];
    in_basis_row_[leaving] = -1;
    state_[leaving] = new_state;
    value_[leaving] = new_state == kAtLower ? lo_[leaving] : hi_[leaving];
    basis_[row] = enter;
    in_basis_row_[enter] = row;
    state_[enter] = kBasic;
    ++pivots_since_refactor_;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int m_, n_, ncols_;
  std::vector<double> dense_;  // original [A S Z]
  std::vector<double> tab_;    // B^{-1} [A S Z]
  std::vector<double> rhs_;
  std::vector<double> lo_, hi_;
  std::vector<double> value_;
  std::vector<unsigned char> state_;
  std::vector<int> basis_;
  std::vector<int> in_basis_row_;
  std::vector<double> phase1_cost_;
  bool needs_phase1_ = false;
  bool force_bland_ = false;
  long pivots_since_refactor_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt) {
  if (lp.rows.empty()) {
    // Pure box problem: each variable sits at its favorable bound.
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.resize(lp.num_vars());
    for (int j = 0; j < lp.num_vars(); ++j)
      sol.x[j] = lp.objective[j] >= 0 ? lp.lower[j] : lp.upper[j];
    for (int j = 0; j < lp.num_vars(); ++j) sol.objective += lp.objective[j] * sol.x[j];
    return sol;
  }
  Tableau tab(lp, opt);
  return tab.run();
}

void write_lp_format(std::ostream& out, const LinearProgram& lp) {
  auto name = [&](int j) {
    return lp.names[j].empty() ? ("x" + std::to_string(j)) : lp.names[j];
  };
  out << "Minimize\n obj:";
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.objective[j] != 0.0)
      out << (lp.objective[j] >= 0 ? " + " : " - ") << std::abs(lp.objective[j]) << ' '
          << name(j);
  out << "\nSubject To\n";
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    out << " c" << r << ":";
    for (auto [col, v] : row.coeffs)
      out << (v >= 0 ? " + " : " - ") << std::abs(v) << ' ' << name(col);
    switch (row.sense) {
      case LinearProgram::Sense::LE: out << " <= "; break;
      case LinearProgram::Sense::GE: out << " >= "; break;
      case LinearProgram::Sense::EQ: out << " = "; break;
    }
    out << row.rhs << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j)
    out << ' ' << lp.lower[j] << " <= " << name(j) << " <= " << lp.upper[j] << '\n';
  out << "End\n";
}

}  // namespace nashbnb
