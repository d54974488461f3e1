#include "nashbnb/game_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nashbnb {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  throw std::runtime_error("NFG parse error: " + what);
}

void expect_token(std::istream& in, const std::string& want) {
  std::string tok;
  if (!(in >> tok) || tok != want) parse_fail("expected '" + want + "'");
}

std::string read_quoted(std::istream& in) {
  char c;
  in >> std::ws;
  if (!in.get(c) || c != '"') parse_fail("expected quoted string");
  std::string s;
  while (in.get(c) && c != '"') s.push_back(c);
  if (c != '"') parse_fail("unterminated string");
  return s;
}

}  // namespace

void write_nfg(std::ostream& out, const Game& g, const std::string& title) {
  out << "NFG 1 R \"" << title << "\" {";
  for (int i = 0; i < g.num_players(); ++i) out << " \"Player " << (i + 1) << "\"";
  out << " } {";
  for (int m : g.actions()) out << ' ' << m;
  out << " }\n\n";
  for (long idx = 0; idx < g.num_profiles(); ++idx) {
    for (int i = 0; i < g.num_players(); ++i) {
      out << format_double(g.utility(i, idx));
      out << (i + 1 < g.num_players() ? ' ' : '\n');
    }
  }
}

Game read_nfg(std::istream& in) {
  expect_token(in, "NFG");
  expect_token(in, "1");
  std::string variant;
  if (!(in >> variant)) parse_fail("missing payoff variant");
  if (variant != "R" && variant != "D") parse_fail("only the payoff format is supported");
  read_quoted(in);  // title

  expect_token(in, "{");
  int num_players = 0;
  in >> std::ws;
  while (in.peek() == '"') {
    read_quoted(in);
    ++num_players;
    in >> std::ws;
  }
  expect_token(in, "}");
  if (num_players < 2) parse_fail("fewer than two players");

  expect_token(in, "{");
  std::vector<int> actions;
  for (int i = 0; i < num_players; ++i) {
    int m;
    if (!(in >> m) || m < 1) parse_fail("bad action count");
    actions.push_back(m);
  }
  expect_token(in, "}");

  long profiles = 1;
  for (int m : actions) profiles *= m;
  std::vector<std::vector<double>> tables(num_players,
                                          std::vector<double>(profiles, 0.0));
  for (long idx = 0; idx < profiles; ++idx) {
    for (int i = 0; i < num_players; ++i) {
      double u;
      if (!(in >> u)) parse_fail("missing payoff entries");
      tables[i][idx] = u;
    }
  }
  return Game(actions, std::move(tables));
}

namespace {

ordered_json utilities_to_json(const Game& g, int player, int depth, long offset) {
  ordered_json arr = ordered_json::array();
  if (depth == g.num_players() - 1) {
    for (int a = 0; a < g.num_actions(depth); ++a)
      arr.push_back(g.utility(player, offset + a * g.strides()[depth]));
  } else {
    for (int a = 0; a < g.num_actions(depth); ++a)
      arr.push_back(utilities_to_json(g, player, depth + 1, offset + a * g.strides()[depth]));
  }
  return arr;
}

void utilities_from_json(const ordered_json& arr, const std::vector<int>& actions,
                         const std::vector<long>& strides, int depth, long offset,
                         std::vector<double>& table) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != actions[depth])
    throw std::runtime_error("utilities array has wrong shape");
  for (int a = 0; a < actions[depth]; ++a) {
    if (depth + 1 == static_cast<int>(actions.size())) {
      if (!arr[a].is_number()) throw std::runtime_error("utility entry is not a number");
      table[offset + a * strides[depth]] = arr[a].get<double>();
    } else {
      utilities_from_json(arr[a], actions, strides, depth + 1,
                          offset + a * strides[depth], table);
    }
  }
}

}  // namespace

void write_game_json(std::ostream& out, const Game& g, const GameMetadata& meta) {
  ordered_json j;
  j["players"] = g.num_players();
  j["actions"] = g.actions();
  ordered_json utils = ordered_json::array();
  for (int i = 0; i < g.num_players(); ++i) utils.push_back(utilities_to_json(g, i, 0, 0));
  j["utilities"] = std::move(utils);
  ordered_json m = ordered_json::object();
  if (meta.seed) m["seed"] = *meta.seed;
  if (!meta.generator.empty()) m["generator"] = meta.generator;
  if (!meta.graph.empty()) m["graph"] = meta.graph;
  j["metadata"] = std::move(m);
  out << j.dump(2) << '\n';
}

Game read_game_json(std::istream& in, GameMetadata* meta) {
  ordered_json j = ordered_json::parse(in);
  int n = j.at("players").get<int>();
  std::vector<int> actions = j.at("actions").get<std::vector<int>>();
  if (static_cast<int>(actions.size()) != n)
    throw std::runtime_error("actions array does not match player count");
  std::vector<long> strides(n);
  long profiles = 1;
  for (int i = 0; i < n; ++i) {
    strides[i] = profiles;
    profiles *= actions[i];
  }
  const auto& utils = j.at("utilities");
  if (!utils.is_array() || static_cast<int>(utils.size()) != n)
    throw std::runtime_error("need one utilities table per player");
  std::vector<std::vector<double>> tables(n, std::vector<double>(profiles, 0.0));
  for (int i = 0; i < n; ++i)
    utilities_from_json(utils[i], actions, strides, 0, 0, tables[i]);
  if (meta) {
    *meta = GameMetadata{};
    if (j.contains("metadata")) {
      const auto& m = j["metadata"];
      if (m.contains("seed")) meta->seed = m["seed"].get<uint64_t>();
      if (m.contains("generator")) meta->generator = m["generator"].get<std::string>();
      if (m.contains("graph")) meta->graph = m["graph"].get<std::string>();
    }
  }
  return Game(actions, std::move(tables));
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file: " + path);
  char head[4] = {};
  in.read(head, 4);
  in.seekg(0);
  if (std::string(head, 4) == "NFG ") return read_nfg(in);
  return read_game_json(in);
}

void save_game(const std::string& path, const Game& g, const GameMetadata& meta,
               const std::string& title) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write game file: " + path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".nfg")
    write_nfg(out, g, title);
  else
    write_game_json(out, g, meta);
}

}  // namespace nashbnb
