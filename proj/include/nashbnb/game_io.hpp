#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "nashbnb/game.hpp"

namespace nashbnb {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

// Generation provenance carried by the JSON game format.
struct GameMetadata {
  std::optional<uint64_t> seed;
  std::string generator;  // "random", "graphical", "" when unknown
  std::string graph;      // "complete", "path", "smallworld", "" when n/a
};

// Gambit NFG payoff format ("NFG 1 R"): title, player list, action counts,
// then whitespace-separated payoffs in column-major profile order with the
// payoffs of one profile listed player by player. Writing then reading
// reproduces the tensor bit-exactly.
void write_nfg(std::ostream& out, const Game& g, const std::string& title = "game");
Game read_nfg(std::istream& in);

// Native JSON format: {players, actions, utilities, metadata}. utilities[i]
// is nested player-0-outermost: utilities[i][a_0][a_1]...[a_{n-1}].
void write_game_json(std::ostream& out, const Game& g, const GameMetadata& meta = {});
Game read_game_json(std::istream& in, GameMetadata* meta = nullptr);

// Loads either format, sniffing NFG by its header literal.
Game load_game(const std::string& path);
void save_game(const std::string& path, const Game& g, const GameMetadata& meta = {},
               const std::string& title = "game");

}  // namespace nashbnb
