#include "nashbnb/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "nashbnb/prng.hpp"

namespace nashbnb {

namespace {

struct Terms {
  std::vector<std::vector<double>> dev;   // deviation payoffs
  std::vector<int> argmax;                // best-response action per player
  std::vector<double> best;               // best-response values
  std::vector<std::vector<double>> term;  // p_i(a) * (best_i - dev_i(a))
  double max_term = 0.0;
};

Terms compute_terms(const Game& g, const MixedProfile& p) {
  Terms t;
  t.dev = all_deviation_payoffs(g, p);
  const int n = g.num_players();
  t.argmax.resize(n);
  t.best.resize(n);
  t.term.resize(n);
  for (int i = 0; i < n; ++i) {
    int arg = 0;
    for (int a = 1; a < g.num_actions(i); ++a)
      if (t.dev[i][a] > t.dev[i][arg]) arg = a;
    t.argmax[i] = arg;
    t.best[i] = t.dev[i][arg];
    t.term[i].resize(g.num_actions(i));
    for (int a = 0; a < g.num_actions(i); ++a) {
      t.term[i][a] = p.probs[i][a] * (t.best[i] - t.dev[i][a]);
      t.max_term = std::max(t.max_term, t.term[i][a]);
    }
  }
  return t;
}

CandidateSolution evaluate(const Game& g, MixedProfile p) {
  CandidateSolution c;
  c.values = best_response_values(g, p);
  c.penalty = eval_penalty(g, p, c.values).penalty;
  c.profile = std::move(p);
  return c;
}

MixedProfile strictly_positive(const Game& g, MixedProfile p) {
  for (int i = 0; i < g.num_players(); ++i) {
    double sum = 0.0;
    for (double& x : p.probs[i]) {
      x = std::max(x, 1e-12);
      sum += x;
    }
    for (double& x : p.probs[i]) x /= sum;
  }
  return p;
}

MixedProfile exp_update(const Game& g, const MixedProfile& p,
                        const std::vector<std::vector<double>>& grad, double step) {
  MixedProfile q = p;
  for (int i = 0; i < g.num_players(); ++i) {
    double sum = 0.0;
    for (int a = 0; a < g.num_actions(i); ++a) {
      double e = std::clamp(step * grad[i][a], -30.0, 30.0);
      q.probs[i][a] = p.probs[i][a] * std::exp(-e);
      sum += q.probs[i][a];
    }
    for (double& x : q.probs[i]) x /= sum;
  }
  return q;
}

// Newton iterations on the square indifference-and-simplex system of the
// support guessed from `p`. Returns a feasible candidate on success.
std::optional<CandidateSolution> support_newton(const Game& g, const MixedProfile& p,
                                                double threshold) {
  const int n = g.num_players();
  std::vector<std::vector<int>> support(n);
  int unknowns = n;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < g.num_actions(i); ++a)
      if (p.probs[i][a] > threshold) support[i].push_back(a);
    if (support[i].empty()) return std::nullopt;
    unknowns += static_cast<int>(support[i].size());
  }

  // Unknown layout: strategy entries on supports, then one value per player.
  std::vector<int> svar_offset(n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    svar_offset[i] = k;
    k += static_cast<int>(support[i].size());
  }
  const int vvar_offset = k;

  MixedProfile cur;
  cur.probs.resize(n);
  for (int i = 0; i < n; ++i) {
    cur.probs[i].assign(g.num_actions(i), 0.0);
    double mass = 0.0;
    for (int a : support[i]) mass += p.probs[i][a];
    for (int a : support[i]) cur.probs[i][a] = p.probs[i][a] / mass;
  }
  std::vector<double> v = best_response_values(g, cur);

  std::vector<double> residual(unknowns);
  std::vector<double> jac(static_cast<size_t>(unknowns) * unknowns);
  auto jat = [&](int r, int c) -> double& {
    return jac[static_cast<size_t>(r) * unknowns + c];
  };

  double res_norm = 0.0;
  for (int iter = 0; iter < 40; ++iter) {
    auto dev = all_deviation_payoffs(g, cur);
    res_norm = 0.0;
    int r = 0;
    for (int i = 0; i < n; ++i)
      for (int a : support[i]) residual[r++] = dev[i][a] - v[i];
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int a : support[i]) sum += cur.probs[i][a];
      residual[r++] = sum - 1.0;
    }
    for (double x : residual) res_norm = std::max(res_norm, std::abs(x));
    if (res_norm <= 1e-13) break;
    if (iter == 39) return std::nullopt;

    std::fill(jac.begin(), jac.end(), 0.0);
    r = 0;
    for (int i = 0; i < n; ++i) {
      auto pair = pairwise_deviation_payoffs(g, i, cur);
      for (int a : support[i]) {
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          for (size_t c = 0; c < support[j].size(); ++c)
            jat(r, svar_offset[j] + static_cast<int>(c)) = pair[a][j][support[j][c]];
        }
        jat(r, vvar_offset + i) = -1.0;
        ++r;
      }
    }
    for (int i = 0; i < n; ++i) {
      for (size_t c = 0; c < support[i].size(); ++c)
        jat(r, svar_offset[i] + static_cast<int>(c)) = 1.0;
      ++r;
    }

    // Dense Gaussian elimination with partial pivoting on [J | -residual].
    std::vector<double> rhs(unknowns);
    for (int q = 0; q < unknowns; ++q) rhs[q] = -residual[q];
    for (int col = 0; col < unknowns; ++col) {
      int piv = col;
      for (int row = col + 1; row < unknowns; ++row)
        if (std::abs(jat(row, col)) > std::abs(jat(piv, col))) piv = row;
      if (std::abs(jat(piv, col)) < 1e-12) return std::nullopt;  // singular support
      if (piv != col) {
        for (int c2 = 0; c2 < unknowns; ++c2) std::swap(jat(piv, c2), jat(col, c2));
        std::swap(rhs[piv], rhs[col]);
      }
      double inv = 1.0 / jat(col, col);
      for (int row = col + 1; row < unknowns; ++row) {
        double f = jat(row, col) * inv;
        if (f == 0.0) continue;
        for (int c2 = col; c2 < unknowns; ++c2) jat(row, c2) -= f * jat(col, c2);
        rhs[row] -= f * rhs[col];
      }
    }
    for (int row = unknowns - 1; row >= 0; --row) {
      double s = rhs[row];
      for (int c2 = row + 1; c2 < unknowns; ++c2) s -= jat(row, c2) * rhs[c2];
      rhs[row] = s / jat(row, row);
    }

    for (int i = 0; i < n; ++i)
      for (size_t c = 0; c < support[i].size(); ++c)
        cur.probs[i][support[i][c]] += rhs[svar_offset[i] + static_cast<int>(c)];
    for (int i = 0; i < n; ++i) v[i] += rhs[vvar_offset + i];
  }

  // Snap to an exact distribution and re-evaluate honestly.
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int a = 0; a < g.num_actions(i); ++a) {
      if (cur.probs[i][a] < 0.0) {
        if (cur.probs[i][a] < -1e-7) return std::nullopt;  // left the simplex
        cur.probs[i][a] = 0.0;
      }
      sum += cur.probs[i][a];
    }
    if (sum <= 0.0) return std::nullopt;
    for (double& x : cur.probs[i]) x /= sum;
  }
  return evaluate(g, std::move(cur));
}

void try_newton(const Game& g, CandidateSolution& best) {
  for (double threshold : {1e-4, 1e-2, 5e-2, 1.5e-1}) {
    auto cand = support_newton(g, best.profile, threshold);
    if (cand && cand->penalty < best.penalty) best = std::move(*cand);
    if (best.penalty <= 1e-14) break;
  }
}

CandidateSolution descend(const Game& g, const MixedProfile& start,
                          const LocalSearchConfig& cfg, int restart_index) {
  MixedProfile p = strictly_positive(g, start);
  CandidateSolution best = evaluate(g, p);
  double temperature = cfg.initial_temperature;
  double step = cfg.initial_step;
  int stall = 0;
  double last_newton_penalty = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iters && best.penalty > cfg.target_varpi; ++iter) {
    if (cfg.trace)
      *cfg.trace << restart_index << ',' << iter << ',' << best.penalty << '\n';

    auto grad = penalty_gradient(g, p, temperature);
    double f0 = smoothed_penalty(g, p, temperature);
    bool accepted = false;
    for (int trial = 0; trial < 24; ++trial) {
      MixedProfile q = exp_update(g, p, grad, step);
      double f1 = smoothed_penalty(g, q, temperature);
      if (f1 < f0 - 1e-15) {
        p = std::move(q);
        accepted = true;
        step = std::min(step * 1.3, 64.0);
        break;
      }
      step *= 0.5;
      if (step < 1e-12) break;
    }

    CandidateSolution cand = evaluate(g, p);
    if (cand.penalty < best.penalty - 1e-15) {
      best = std::move(cand);
      stall = 0;
    } else {
      ++stall;
    }
    if (!accepted) ++stall;

    if (stall >= cfg.stall_iters) {
      temperature = std::max(temperature * 0.5, cfg.min_temperature);
      step = cfg.initial_step;
      stall = 0;
    }

    // Periodic Newton refinement once the iterate looks promising.
    if ((iter + 1) % 40 == 0 && best.penalty < 0.1 &&
        best.penalty < 0.999 * last_newton_penalty) {
      last_newton_penalty = best.penalty;
      try_newton(g, best);
    }
  }
  // Final refinement even below target: Newton solutions carry exact zeros
  // off support, which downstream witness conversion relies on.
  try_newton(g, best);
  return best;
}

}  // namespace

double smoothed_penalty(const Game& g, const MixedProfile& p, double temperature) {
  Terms t = compute_terms(g, p);
  double sum = 0.0;
  for (int i = 0; i < g.num_players(); ++i)
    for (int a = 0; a < g.num_actions(i); ++a)
      sum += std::exp((t.term[i][a] - t.max_term) / temperature);
  return t.max_term + temperature * std::log(sum);
}

std::vector<std::vector<double>> penalty_gradient(const Game& g, const MixedProfile& p,
                                                  double temperature) {
  if (temperature <= 0) throw std::invalid_argument("temperature must be positive");
  Terms t = compute_terms(g, p);
  const int n = g.num_players();

  // Softmax weights of the smoothed max.
  std::vector<std::vector<double>> weight(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    weight[i].resize(g.num_actions(i));
    for (int a = 0; a < g.num_actions(i); ++a) {
      weight[i][a] = std::exp((t.term[i][a] - t.max_term) / temperature);
      total += weight[i][a];
    }
  }
  for (auto& w : weight)
    for (double& x : w) x /= total;

  std::vector<std::vector<double>> grad(n);
  for (int j = 0; j < n; ++j) grad[j].assign(g.num_actions(j), 0.0);

  for (int i = 0; i < n; ++i) {
    auto pair = pairwise_deviation_payoffs(g, i, p);
    int star = t.argmax[i];
    for (int a = 0; a < g.num_actions(i); ++a) {
      double w = weight[i][a];
      if (w == 0.0) continue;
      // Own entry: d term / d p_i(a) = best_i - dev_i(a).
      grad[i][a] += w * (t.best[i] - t.dev[i][a]);
      // Cross entries through both dev_i(a) and the envelope of best_i.
      double scale = w * p.probs[i][a];
      if (scale == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        for (int b = 0; b < g.num_actions(j); ++b)
          grad[j][b] += scale * (pair[star][j][b] - pair[a][j][b]);
      }
    }
  }
  return grad;
}

CandidateSolution local_solve(const Game& g, const LocalSearchConfig& cfg) {
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (cfg.target_varpi < 0) throw std::invalid_argument("target_varpi must be nonnegative");
  if (cfg.trace) *cfg.trace << "restart,iteration,penalty\n";

  SplitMix64 rng(cfg.seed);
  CandidateSolution best;
  best.penalty = std::numeric_limits<double>::infinity();
  int restarts = std::max(1, cfg.restarts);
  for (int r = 0; r < restarts; ++r) {
    MixedProfile start;
    if (r == 0) {
      start = MixedProfile::uniform(g.actions());
    } else {
      // Dirichlet(1) start: normalized exponentials.
      start.probs.resize(g.num_players());
      for (int i = 0; i < g.num_players(); ++i) {
        start.probs[i].resize(g.num_actions(i));
        double sum = 0.0;
        for (double& x : start.probs[i]) {
          x = rng.exponential() + 1e-12;
          sum += x;
        }
        for (double& x : start.probs[i]) x /= sum;
      }
    }
    CandidateSolution cand = descend(g, start, cfg, r);
    if (cand.penalty < best.penalty) best = std::move(cand);
    if (best.penalty <= cfg.target_varpi) break;
  }
  return best;
}

CandidateSolution local_polish(const Game& g, const MixedProfile& start, int max_iters,
                               double target_varpi) {
  LocalSearchConfig cfg;
  cfg.max_iters = std::max(1, max_iters);
  cfg.restarts = 1;
  cfg.target_varpi = std::max(0.0, target_varpi);
  return descend(g, start, cfg, 0);
}

}  // namespace nashbnb
