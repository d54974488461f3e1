#include "nashbnb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nashbnb {

PureScanResult pure_epsilon_scan(const Game& g, long profile_cap) {
  if (g.num_profiles() > profile_cap)
    throw std::invalid_argument("game exceeds the pure-scan profile cap");
  const int n = g.num_players();
  PureScanResult out;
  out.best_epsilon = std::numeric_limits<double>::infinity();
  bool keep_table = g.num_profiles() <= kPureScanTableCap;
  if (keep_table) out.epsilon_table.reserve(g.num_profiles());

  std::vector<int> a(n, 0);
  for (long idx = 0; idx < g.num_profiles(); ++idx) {
    double eps = 0.0;
    for (int i = 0; i < n; ++i) {
      double here = g.utility(i, idx);
      double best = here;
      long base = idx - a[i] * g.strides()[i];
      for (int b = 0; b < g.num_actions(i); ++b)
        best = std::max(best, g.utility(i, base + b * g.strides()[i]));
      eps = std::max(eps, best - here);
    }
    if (keep_table) out.epsilon_table.push_back(eps);
    if (eps < out.best_epsilon) {
      out.best_epsilon = eps;
      out.best_profile.actions = a;
    }
    for (int j = 0; j < n; ++j) {
      if (++a[j] < g.num_actions(j)) break;
      a[j] = 0;
    }
  }
  return out;
}

namespace {

// Gaussian elimination with partial pivoting; false on rank deficiency.
bool solve_dense(std::vector<double>& mat, std::vector<double>& rhs, int n) {
  auto at = [&](int r, int c) -> double& { return mat[static_cast<size_t>(r) * n + c]; };
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(at(row, col)) > std::abs(at(piv, col))) piv = row;
    if (std::abs(at(piv, col)) < 1e-11) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(at(piv, c), at(col, c));
      std::swap(rhs[piv], rhs[col]);
    }
    double inv = 1.0 / at(col, col);
    for (int row = col + 1; row < n; ++row) {
      double f = at(row, col) * inv;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) at(row, c) -= f * at(col, c);
      rhs[row] -= f * rhs[col];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    double s = rhs[row];
    for (int c = row + 1; c < n; ++c) s -= at(row, c) * rhs[c];
    rhs[row] = s / at(row, row);
  }
  return true;
}

}  // namespace

void write_epsilon_table_csv(std::ostream& out, const Game& g, const PureScanResult& r) {
  if (r.epsilon_table.empty())
    throw std::invalid_argument("scan did not store the per-profile table");
  out << "profile";
  for (int i = 0; i < g.num_players(); ++i) out << ",a" << i;
  out << ",epsilon\n";
  std::vector<int> a(g.num_players(), 0);
  for (long idx = 0; idx < g.num_profiles(); ++idx) {
    out << idx;
    for (int ai : a) out << ',' << ai;
    out << ',' << r.epsilon_table[idx] << '\n';
    for (int j = 0; j < g.num_players(); ++j) {
      if (++a[j] < g.num_actions(j)) break;
      a[j] = 0;
    }
  }
}

std::vector<MixedProfile> support_enumeration_2p(const Game& g, int max_support) {
  if (g.num_players() != 2)
    throw std::invalid_argument("support enumeration oracle is two-player only");
  const int m0 = g.num_actions(0), m1 = g.num_actions(1);
  auto payoff = [&](int player, int a0, int a1) {
    return g.utility(player, a0 * g.strides()[0] + a1 * g.strides()[1]);
  };

  std::vector<MixedProfile> found;
  auto already_known = [&](const MixedProfile& p) {
    for (const MixedProfile& q : found) {
      double dist = 0.0;
      for (int i = 0; i < 2; ++i)
        for (size_t a = 0; a < p.probs[i].size(); ++a)
          dist = std::max(dist, std::abs(p.probs[i][a] - q.probs[i][a]));
      if (dist < 1e-8) return true;
    }
    return false;
  };

  // Support masks in lexicographic order for a deterministic result list.
  for (int mask0 = 1; mask0 < (1 << m0); ++mask0) {
    std::vector<int> s0;
    for (int a = 0; a < m0; ++a)
      if (mask0 & (1 << a)) s0.push_back(a);
    if (static_cast<int>(s0.size()) > max_support) continue;
    for (int mask1 = 1; mask1 < (1 << m1); ++mask1) {
      std::vector<int> s1;
      for (int a = 0; a < m1; ++a)
        if (mask1 & (1 << a)) s1.push_back(a);
      if (static_cast<int>(s1.size()) > max_support) continue;

      // Unknowns: p0 on s0, p1 on s1, v0, v1.
      const int k0 = static_cast<int>(s0.size()), k1 = static_cast<int>(s1.size());
      const int dim = k0 + k1 + 2;
      std::vector<double> mat(static_cast<size_t>(dim) * dim, 0.0);
      std::vector<double> rhs(dim, 0.0);
      auto at = [&](int r, int c) -> double& {
        return mat[static_cast<size_t>(r) * dim + c];
      };
      int r = 0;
      // Player 0 indifferent across its support: sum_b u0(a, b) p1(b) = v0.
      for (int a : s0) {
        for (int c = 0; c < k1; ++c) at(r, k0 + c) = payoff(0, a, s1[c]);
        at(r, k0 + k1) = -1.0;
        ++r;
      }
      for (int b : s1) {
        for (int c = 0; c < k0; ++c) at(r, c) = payoff(1, s0[c], b);
        at(r, k0 + k1 + 1) = -1.0;
        ++r;
      }
      for (int c = 0; c < k0; ++c) at(r, c) = 1.0;
      rhs[r++] = 1.0;
      for (int c = 0; c < k1; ++c) at(r, k0 + c) = 1.0;
      rhs[r++] = 1.0;

      if (!solve_dense(mat, rhs, dim)) continue;

      bool ok = true;
      for (int c = 0; c < k0 + k1 && ok; ++c)
        if (rhs[c] < -1e-9) ok = false;
      if (!ok) continue;

      MixedProfile p;
      p.probs = {std::vector<double>(m0, 0.0), std::vector<double>(m1, 0.0)};
      for (int c = 0; c < k0; ++c) p.probs[0][s0[c]] = std::max(0.0, rhs[c]);
      for (int c = 0; c < k1; ++c) p.probs[1][s1[c]] = std::max(0.0, rhs[k0 + c]);
      for (int i = 0; i < 2; ++i) {
        double sum = 0.0;
        for (double x : p.probs[i]) sum += x;
        for (double& x : p.probs[i]) x /= sum;
      }
      if (exploitability(g, p).epsilon > 1e-9) continue;
      if (!already_known(p)) found.push_back(std::move(p));
    }
  }
  return found;
}

}  // namespace nashbnb
