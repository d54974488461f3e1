#include "nashbnb/serialize.hpp"

#include <json.hpp>

namespace nashbnb {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json profile_json(const MixedProfile& p) {
  ordered_json delta = ordered_json::array();
  for (const auto& row : p.probs) delta.push_back(row);
  return delta;
}

}  // namespace

std::string candidate_to_json(const Game& g, const CandidateSolution& c) {
  ordered_json j;
  j["delta"] = profile_json(c.profile);
  j["v"] = c.values;
  j["varpi"] = c.penalty;
  j["epsilon_bound"] = epsilon_bound(c.penalty, g);
  j["epsilon_measured"] = exploitability(g, c.profile).epsilon;
  return j.dump(2);
}

std::string result_to_json(const SolveResult& r, const SolveConfig& cfg) {
  ordered_json j;
  j["status"] = to_string(r.status);
  j["varpi"] = r.solution.penalty;
  j["certified_epsilon"] = r.certified_epsilon;
  j["measured_epsilon"] = r.measured_epsilon;
  j["delta"] = profile_json(r.solution.profile);
  j["v"] = r.solution.values;
  j["nodes"] = r.stats.nodes;
  j["lp_solves"] = r.stats.lp_solves;
  j["global_lower"] = r.stats.global_lower;
  j["wall_time_s"] = r.stats.wall_time_s;
  j["seed"] = cfg.seed;
  ordered_json c;
  c["gap_tol_abs"] = cfg.gap_tol_abs;
  c["varpi_target"] = cfg.varpi_target;
  c["time_limit_s"] = cfg.time_limit_s;
  c["node_limit"] = cfg.node_limit;
  c["plunge_depth"] = cfg.plunge_depth;
  c["warm_start"] = cfg.warm_start;
  c["polish_incumbent"] = cfg.polish_incumbent;
  c["root_tighten"] = cfg.root_tighten;
  c["workers"] = cfg.workers;
  c["deterministic"] = cfg.deterministic;
  c["restarts"] = cfg.local.restarts;
  c["local_max_iters"] = cfg.local.max_iters;
  j["config"] = std::move(c);
  return j.dump(2);
}

MixedProfile profile_from_json(std::istream& in, const Game& g) {
  ordered_json j = ordered_json::parse(in);
  const ordered_json& delta = j.is_array() ? j : j.at("delta");
  MixedProfile p;
  p.probs = delta.get<std::vector<std::vector<double>>>();
  return checked_profile(g, std::move(p));
}

}  // namespace nashbnb
