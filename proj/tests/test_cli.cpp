#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nashbnb/cli.hpp"
#include "nashbnb/game_io.hpp"
#include "test_oracles.hpp"

using namespace nashbnb;
using nlohmann::json;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::vector<const char*> argv = {"nashbnb"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/nashbnb_test_") + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

}  // namespace

TEST_CASE("generate writes a valid nfg that round-trips") {
  std::string path = temp_path("gen.nfg");
  RunResult r = run({"generate", "--players", "3", "--actions", "3", "--gen", "random",
                     "--seed", "7", "-o", path});
  CHECK(r.code == 0);
  CHECK(r.err.find("seed 7") != std::string::npos);
  Game g = load_game(path);
  CHECK(g.num_players() == 3);
  CHECK(g.num_profiles() == 27);
  // Byte-identical second write.
  std::ifstream in(path);
  std::stringstream first;
  first << in.rdbuf();
  std::ostringstream second;
  write_nfg(second, g, "game");
  CHECK(first.str() == second.str());
}

TEST_CASE("generate rejects single-player requests") {
  RunResult r = run({"generate", "--players", "1", "--actions", "2"});
  CHECK(r.code == 1);
}

TEST_CASE("graphical path games ignore the far player") {
  std::string path = temp_path("path.json");
  RunResult r = run({"generate", "--players", "3", "--actions", "3", "--gen",
                     "graphical", "--graph", "path", "--seed", "3", "-o", path});
  REQUIRE(r.code == 0);
  Game g = load_game(path);
  for (int a0 = 0; a0 < 3; ++a0)
    for (int a1 = 0; a1 < 3; ++a1) {
      double ref = g.utility(0, PureProfile{{a0, a1, 0}});
      for (int a2 = 1; a2 < 3; ++a2)
        CHECK(g.utility(0, PureProfile{{a0, a1, a2}}) == ref);
    }
}

TEST_CASE("solve: exit codes track the status") {
  std::string path = temp_path("solve.nfg");
  {
    std::ofstream f(path);
    write_nfg(f, testutil::rps(), "rps");
  }
  SUBCASE("an exact solve exits 0 with a tight epsilon") {
    RunResult r = run({"solve", path, "--deterministic"});
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["status"] == "optimal");
    CHECK(j["measured_epsilon"].get<double>() <= 1e-6);
    CHECK(j["wall_time_s"].get<double>() == 0.0);
  }
  SUBCASE("a certified-quality run reports epsilon_reached") {
    RunResult r = run({"solve", path, "--mode", "sbnb-e", "--target-eps", "1e-2",
                       "--deterministic"});
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["status"] == "epsilon_reached");
    CHECK(j["certified_epsilon"].get<double>() <= 1e-2);
    CHECK(j["measured_epsilon"].get<double>() <=
          j["certified_epsilon"].get<double>());
  }
  SUBCASE("an expired time limit exits 2 but still reports a point") {
    std::string hard = temp_path("solve3p.json");
    run({"generate", "--players", "3", "--actions", "3", "--seed", "9", "-o", hard});
    RunResult r = run({"solve", hard, "--time-limit", "1e-9", "--deterministic"});
    CHECK(r.code == 2);
    json j = json::parse(r.out);
    CHECK(j["status"] == "limit");
    CHECK(j["measured_epsilon"].get<double>() <=
          j["certified_epsilon"].get<double>() + 1e-15);
  }
  SUBCASE("unreadable input exits 1") {
    RunResult r = run({"solve", "/nonexistent/file.nfg"});
    CHECK(r.code == 1);
  }
}

TEST_CASE("solve --normalize maps the certificate back to the input scale") {
  std::string path = temp_path("mp.nfg");
  {
    std::ofstream f(path);
    write_nfg(f, testutil::matching_pennies(), "mp");
  }
  RunResult r = run({"solve", path, "--normalize", "--deterministic"});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  Game g = load_game(path);
  // Certificate still dominates the measured epsilon on the original game.
  double measured = j["measured_epsilon"].get<double>();
  double certified = j["certified_epsilon"].get<double>();
  CHECK(measured <= certified + 1e-15);
  CHECK(measured <= 1e-6);
  // Uniform equilibrium: values must be the original-scale payoff 0.
  CHECK(std::abs(j["v"][0].get<double>()) <= 1e-6);
}

TEST_CASE("eval reports per-player exploitability") {
  std::string game_path = temp_path("bos.nfg");
  {
    std::ofstream f(game_path);
    write_nfg(f, testutil::battle_of_sexes(), "bos");
  }
  SUBCASE("uniform profile on rps is exact") {
    std::string rps_path = temp_path("rps_eval.nfg");
    {
      std::ofstream f(rps_path);
      write_nfg(f, testutil::rps(), "rps");
    }
    std::string prof = temp_path("uniform3.json");
    write_file(prof, R"({"delta": [[0.3333333333333333, 0.3333333333333333,
                       0.3333333333333334], [0.3333333333333333,
                       0.3333333333333333, 0.3333333333333334]]})");
    RunResult r = run({"eval", rps_path, prof});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["epsilon"].get<double>() <= 1e-9);
  }
  SUBCASE("the mixed equilibrium is tight") {
    std::string prof = temp_path("bos_mixed.json");
    write_file(prof, R"({"delta": [[0.6666666666666666, 0.3333333333333334],
                       [0.3333333333333333, 0.6666666666666667]]})");
    RunResult r = run({"eval", game_path, prof});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["epsilon"].get<double>() <= 1e-9);
  }
  SUBCASE("the uniform profile matches the brute-force oracle") {
    std::string prof = temp_path("bos_uniform.json");
    write_file(prof, R"({"delta": [[0.5, 0.5], [0.5, 0.5]]})");
    RunResult r = run({"eval", game_path, prof});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    Game g = testutil::battle_of_sexes();
    MixedProfile uniform = MixedProfile::uniform(g.actions());
    double expected = testutil::brute_exploitability(g, uniform);
    CHECK(j["epsilon"].get<double>() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch is an error") {
    std::string prof = temp_path("bad.json");
    write_file(prof, R"({"delta": [[0.5, 0.5]]})");
    RunResult r = run({"eval", game_path, prof});
    CHECK(r.code == 1);
  }
}

TEST_CASE("eval on solve output satisfies the certificate") {
  std::string game_path = temp_path("endtoend.json");
  run({"generate", "--players", "2", "--actions", "4", "--seed", "21", "-o", game_path});
  RunResult solved = run({"solve", game_path, "--deterministic"});
  REQUIRE(solved.code == 0);
  std::string prof = temp_path("endtoend_profile.json");
  write_file(prof, solved.out);
  RunResult evaled = run({"eval", game_path, prof});
  REQUIRE(evaled.code == 0);
  double measured = json::parse(evaled.out)["epsilon"].get<double>();
  double certified = json::parse(solved.out)["certified_epsilon"].get<double>();
  CHECK(measured <= certified + 1e-15);
}

TEST_CASE("bench produces one row per instance and is reproducible") {
  std::vector<std::string> args = {"bench", "--cells", "2x2,2x3", "--seed-lo", "0",
                                   "--seed-hi", "2", "--deterministic"};
  RunResult a = run(args);
  REQUIRE(a.code == 0);
  std::istringstream lines(a.out);
  std::string line;
  int rows = 0, comments = 0, headers = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("#", 0) == 0)
      ++comments;
    else if (line.rfind("instance,", 0) == 0)
      ++headers;
    else if (!line.empty())
      ++rows;
  }
  CHECK(comments == 1);
  CHECK(headers == 1);
  CHECK(rows == 6);
  CHECK(a.err.find("cell 2x2: 0/3") != std::string::npos);

  RunResult b = run(args);
  CHECK(a.out == b.out);  // byte-identical in deterministic mode
}

TEST_CASE("local-only mode works through the cli") {
  std::string path = temp_path("local.nfg");
  {
    std::ofstream f(path);
    write_nfg(f, testutil::rps(), "rps");
  }
  RunResult r = run({"solve", path, "--mode", "local-only", "--deterministic"});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["status"] == "epsilon_reached");
  CHECK(j["nodes"].get<long>() == 0);
}

TEST_CASE("environment config supplies solve defaults") {
  std::string cfg_path = temp_path("env.json");
  write_file(cfg_path, R"({"node_limit": 123456, "restarts": 3})");
  setenv("NASHBNB_CONFIG", cfg_path.c_str(), 1);
  std::string path = temp_path("envgame.nfg");
  {
    std::ofstream f(path);
    write_nfg(f, testutil::coordination2(), "coord");
  }
  RunResult r = run({"solve", path, "--deterministic"});
  unsetenv("NASHBNB_CONFIG");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["config"]["node_limit"].get<long>() == 123456);
  CHECK(j["config"]["restarts"].get<int>() == 3);
}

TEST_CASE("lp dump flag writes a readable relaxation") {
  std::string path = temp_path("dump.nfg");
  {
    std::ofstream f(path);
    write_nfg(f, testutil::coordination2(), "coord");
  }
  std::string dump = temp_path("root.lp");
  RunResult r = run({"solve", path, "--dump-lp", dump, "--deterministic"});
  REQUIRE(r.code == 0);
  std::ifstream in(dump);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("Minimize") != std::string::npos);
  CHECK(text.str().find("Subject To") != std::string::npos);
}
