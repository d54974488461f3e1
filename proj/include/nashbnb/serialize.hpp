#pragma once

#include <iosfwd>
#include <string>

#include "nashbnb/formulation.hpp"
#include "nashbnb/game.hpp"
#include "nashbnb/sbnb.hpp"

namespace nashbnb {

// {delta, v, varpi, epsilon_bound, epsilon_measured}
std::string candidate_to_json(const Game& g, const CandidateSolution& c);

// {status, varpi, certified_epsilon, measured_epsilon, delta, v, nodes,
//  lp_solves, wall_time_s, seed, config}
std::string result_to_json(const SolveResult& r, const SolveConfig& cfg);

// Accepts any JSON object carrying a "delta" array of per-player
// probability vectors (solver output or hand-written profiles).
MixedProfile profile_from_json(std::istream& in, const Game& g);

}  // namespace nashbnb
