#include "nashbnb/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nashbnb {

namespace {

void check_values(const Game& g, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != g.num_players())
    throw std::invalid_argument("need one value variable per player");
}

}  // namespace

PenaltyValue eval_penalty(const Game& g, const MixedProfile& p,
                          const std::vector<double>& values) {
  check_values(g, values);
  auto dev = all_deviation_payoffs(g, p);
  PenaltyValue out;
  for (int i = 0; i < g.num_players(); ++i) {
    for (int a = 0; a < g.num_actions(i); ++a) {
      double term = std::abs(p.probs[i][a] * (values[i] - dev[i][a]));
      if (term > out.penalty) {
        out.penalty = term;
        out.worst_player = i;
        out.worst_action = a;
      }
    }
  }
  return out;
}

double QFeasReport::max_violation() const {
  return std::max({stationarity, complementarity, simplex, box});
}

std::string QFeasReport::describe() const {
  std::ostringstream os;
  os << "stationarity=" << stationarity << " complementarity=" << complementarity
     << " simplex=" << simplex << " box=" << box;
  return os.str();
}

QFeasReport check_Q_feasible(const Game& g, const MixedProfile& p,
                             const std::vector<double>& values) {
  check_values(g, values);
  auto dev = all_deviation_payoffs(g, p);
  QFeasReport r;
  for (int i = 0; i < g.num_players(); ++i) {
    double sum = 0.0;
    for (int a = 0; a < g.num_actions(i); ++a) {
      double prob = p.probs[i][a];
      sum += prob;
      r.box = std::max({r.box, -prob, prob - 1.0});
      r.stationarity = std::max(r.stationarity, dev[i][a] - values[i]);
      r.complementarity =
          std::max(r.complementarity, std::abs(prob * (values[i] - dev[i][a])));
    }
    r.simplex = std::max(r.simplex, std::abs(sum - 1.0));
    r.box = std::max({r.box, g.min_utility(i) - values[i], values[i] - g.max_utility(i)});
  }
  return r;
}

double PFeasReport::max_violation() const {
  return std::max({value_identity, support_link, slack_bigm, simplex, box});
}

std::string PFeasReport::describe() const {
  std::ostringstream os;
  os << "value_identity=" << value_identity << " support_link=" << support_link
     << " slack_bigm=" << slack_bigm << " simplex=" << simplex << " box=" << box;
  return os.str();
}

PFeasReport check_P_feasible(const Game& g, const MipWitness& w) {
  check_values(g, w.values);
  auto dev = all_deviation_payoffs(g, w.profile);
  PFeasReport r;
  for (int i = 0; i < g.num_players(); ++i) {
    double range = g.max_utility(i) - g.min_utility(i);
    double sum = 0.0;
    for (int a = 0; a < g.num_actions(i); ++a) {
      double prob = w.profile.probs[i][a];
      double slack = w.s[i][a];
      int z = w.z[i][a];
      if (z != 0 && z != 1) throw std::invalid_argument("indicator must be binary");
      sum += prob;
      r.value_identity =
          std::max(r.value_identity, std::abs(w.values[i] - slack - dev[i][a]));
      r.support_link = std::max(r.support_link, prob - z);
      r.slack_bigm = std::max(r.slack_bigm, slack - (1.0 - z) * range);
      r.box = std::max({r.box, -prob, prob - 1.0, -slack, slack - range});
    }
    r.simplex = std::max(r.simplex, std::abs(sum - 1.0));
    r.box = std::max(
        {r.box, g.min_utility(i) - w.values[i], w.values[i] - g.max_utility(i)});
  }
  return r;
}

MipWitness q_to_p_witness(const Game& g, const MixedProfile& p,
                          const std::vector<double>& values, double tol) {
  QFeasReport q = check_Q_feasible(g, p, values);
  if (!q.feasible(tol))
    throw std::invalid_argument("point is not feasible for the complementarity program: " +
                                q.describe());
  auto dev = all_deviation_payoffs(g, p);
  MipWitness w;
  w.profile = p;
  w.values = values;
  w.z.resize(g.num_players());
  w.s.resize(g.num_players());
  for (int i = 0; i < g.num_players(); ++i) {
    w.z[i].resize(g.num_actions(i));
    w.s[i].resize(g.num_actions(i));
    for (int a = 0; a < g.num_actions(i); ++a) {
      w.s[i][a] = values[i] - dev[i][a];
      w.z[i][a] = p.probs[i][a] > kSupportTol ? 1 : 0;
    }
  }
  PFeasReport r = check_P_feasible(g, w);
  if (!r.feasible(tol))
    throw std::invalid_argument("constructed witness violates the integer encoding: " +
                                r.describe());
  return w;
}

CandidateSolution p_to_q_project(const Game& g, const MipWitness& w, double tol) {
  PFeasReport r = check_P_feasible(g, w);
  if (!r.feasible(tol))
    throw std::invalid_argument("witness is not feasible for the integer encoding: " +
                                r.describe());
  QFeasReport q = check_Q_feasible(g, w.profile, w.values);
  if (!q.feasible(tol))
    throw std::invalid_argument("projected point violates the complementarity program: " +
                                q.describe());
  CandidateSolution c;
  c.profile = w.profile;
  c.values = w.values;
  c.penalty = eval_penalty(g, w.profile, w.values).penalty;
  return c;
}

double epsilon_bound(double penalty, const Game& g) {
  if (penalty < 0) throw std::invalid_argument("penalty must be nonnegative");
  int max_actions = *std::max_element(g.actions().begin(), g.actions().end());
  return penalty * max_actions;
}

std::vector<double> best_response_values(const Game& g, const MixedProfile& p) {
  auto dev = all_deviation_payoffs(g, p);
  std::vector<double> v(g.num_players());
  for (int i = 0; i < g.num_players(); ++i)
    v[i] = *std::max_element(dev[i].begin(), dev[i].end());
  return v;
}

}  // namespace nashbnb
