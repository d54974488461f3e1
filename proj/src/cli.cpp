#include "nashbnb/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nashbnb/game_io.hpp"
#include "nashbnb/oracle.hpp"
#include "nashbnb/serialize.hpp"

namespace nashbnb::cli {

namespace {

std::vector<int> expand_actions(int players, const std::vector<int>& actions) {
  if (actions.empty()) throw std::invalid_argument("--actions is required");
  if (actions.size() == 1) return std::vector<int>(players, actions[0]);
  if (static_cast<int>(actions.size()) != players)
    throw std::invalid_argument("--actions needs one entry or one per player");
  return actions;
}

Adjacency named_graph(const std::string& kind, int players, uint64_t seed) {
  if (kind == "complete") return complete_graph(players);
  if (kind == "path") return path_graph(players);
  if (kind == "smallworld") return small_world_graph(players, seed);
  throw std::invalid_argument("unknown graph kind: " + kind);
}

Game make_instance(const GenerateOptions& opt) {
  std::vector<int> actions = expand_actions(opt.players, opt.actions);
  if (opt.generator == "random")
    return generate_random(opt.players, actions, opt.seed, opt.entry_cap);
  if (opt.generator == "graphical")
    return generate_graphical(opt.players, actions,
                              named_graph(opt.graph, opt.players, opt.seed), opt.seed,
                              opt.entry_cap);
  throw std::invalid_argument("unknown generator: " + opt.generator);
}

SolveConfig to_config(const SolveOptions& opt, const Game& g) {
  SolveConfig cfg;
  cfg.gap_tol_abs = opt.gap_tol;
  cfg.time_limit_s = opt.time_limit_s;
  cfg.node_limit = opt.node_limit;
  cfg.workers = opt.workers;
  cfg.deterministic = opt.deterministic;
  cfg.warm_start = opt.warm_start;
  cfg.seed = opt.seed;
  cfg.local.restarts = opt.restarts;
  cfg.local.max_iters = opt.local_iters;
  if (opt.mode == "sbnb-e") {
    double target = opt.target_eps > 0 ? opt.target_eps : 1e-2;
    int max_actions = *std::max_element(g.actions().begin(), g.actions().end());
    cfg.varpi_target = target / max_actions;
  } else if (opt.target_eps > 0) {
    int max_actions = *std::max_element(g.actions().begin(), g.actions().end());
    cfg.varpi_target = opt.target_eps / max_actions;
  }
  return cfg;
}

struct SolveOutcome {
  SolveResult result;
  SolveConfig cfg;
};

// Solves, optionally on the per-player [0,1] normalization with the
// certificate mapped back to the input scale.
SolveOutcome run_solver(const Game& g, const SolveOptions& opt, std::ostream& err) {
  SolveConfig cfg = to_config(opt, g);

  std::ofstream trace;
  if (!opt.trace_csv.empty()) {
    trace.open(opt.trace_csv);
    if (!trace) throw std::runtime_error("cannot write trace file: " + opt.trace_csv);
    cfg.local.trace = &trace;
  }
  if (opt.log_nodes) cfg.node_log = &err;

  if (!opt.dump_lp.empty()) {
    std::ofstream lp_out(opt.dump_lp);
    if (!lp_out) throw std::runtime_error("cannot write LP dump: " + opt.dump_lp);
    VarIndex vars(g);
    Relaxation rel = build_relaxation(g, vars, root_box(g));
    write_lp_format(lp_out, rel.lp);
  }

  if (opt.mode == "local-only") {
    LocalSearchConfig local = cfg.local;
    local.seed = cfg.seed;
    if (cfg.varpi_target >= 0) local.target_varpi = cfg.varpi_target;
    auto t0 = std::chrono::steady_clock::now();
    CandidateSolution c = local_solve(g, local);
    SolveResult r;
    r.solution = std::move(c);
    r.certified_epsilon = epsilon_bound(r.solution.penalty, g);
    r.measured_epsilon = exploitability(g, r.solution.profile).epsilon;
    r.status = cfg.varpi_target >= 0 && r.solution.penalty <= cfg.varpi_target
                   ? SolveStatus::EpsilonReached
               : r.solution.penalty <= local.target_varpi ? SolveStatus::EpsilonReached
                                                          : SolveStatus::Limit;
    r.stats.wall_time_s =
        cfg.deterministic
            ? 0.0
            : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(r), cfg};
  }

  if (!opt.normalize) return {solve(g, cfg), cfg};

  NormalizedGame norm = normalize(g);
  SolveResult r = solve(norm.game, cfg);
  // Map the certificate back: per player, eps_orig = eps_norm / scale.
  double certified = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    const AffineTransform& tf = norm.transforms[i];
    if (tf.scale > 0)
      certified = std::max(certified, r.certified_epsilon / tf.scale);
    r.solution.values[i] = tf.scale > 0
                               ? (r.solution.values[i] - tf.shift) / tf.scale
                               : g.min_utility(i);
  }
  r.certified_epsilon = certified;
  r.solution.penalty = eval_penalty(g, r.solution.profile, r.solution.values).penalty;
  r.measured_epsilon = exploitability(g, r.solution.profile).epsilon;
  return {std::move(r), cfg};
}

int status_exit_code(SolveStatus s) { return s == SolveStatus::Limit ? 2 : 0; }

}  // namespace

int run_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
  Game g = make_instance(opt);
  GameMetadata meta;
  meta.seed = opt.seed;
  meta.generator = opt.generator;
  if (opt.generator == "graphical") meta.graph = opt.graph;
  if (opt.output.empty()) {
    write_game_json(out, g, meta);
  } else {
    save_game(opt.output, g, meta);
  }
  err << "generated " << g.num_players() << " players, actions";
  for (int m : g.actions()) err << ' ' << m;
  err << ", " << g.num_players() * g.num_profiles() << " entries, seed " << opt.seed
      << '\n';
  return 0;
}

int run_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  Game g = load_game(opt.game_path);
  SolveOutcome res = run_solver(g, opt, err);
  out << result_to_json(res.result, res.cfg) << '\n';
  return status_exit_code(res.result.status);
}

int run_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  Game g = load_game(opt.game_path);
  std::ifstream in(opt.profile_path);
  if (!in) throw std::runtime_error("cannot open profile file: " + opt.profile_path);
  MixedProfile p = profile_from_json(in, g);
  Exploitability e = exploitability(g, p);
  nlohmann::ordered_json j;
  j["epsilon"] = e.epsilon;
  j["per_player"] = e.per_player;
  out << j.dump(2) << '\n';
  (void)err;
  return 0;
}

int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.cells.empty()) throw std::invalid_argument("bench needs at least one --cell");
  if (opt.seed_hi < opt.seed_lo) throw std::invalid_argument("bad seed range");
  out << "# nashbnb bench csv v1\n";
  out << "instance,players,actions,seed,status,wall_time_s,varpi,certified_eps,"
         "measured_eps,nodes\n";
  for (const std::string& cell : opt.cells) {
    size_t x = cell.find('x');
    if (x == std::string::npos) throw std::invalid_argument("cell must look like 3x4");
    int players = std::stoi(cell.substr(0, x));
    int actions = std::stoi(cell.substr(x + 1));
    long timeouts = 0, total = 0;
    for (uint64_t seed = opt.seed_lo; seed <= opt.seed_hi; ++seed) {
      GenerateOptions gen;
      gen.players = players;
      gen.actions = {actions};
      gen.generator = opt.generator;
      gen.graph = opt.graph;
      gen.seed = seed;
      Game g = make_instance(gen);

      SolveOptions run = opt.run;
      run.seed = seed;
      auto t0 = std::chrono::steady_clock::now();
      SolveOutcome res = run_solver(g, run, err);
      double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (run.deterministic) wall = 0.0;

      std::string instance =
          opt.generator + (opt.generator == "graphical" ? "-" + opt.graph : "") + "-" +
          cell + "-s" + std::to_string(seed);
      out << instance << ',' << players << ',' << actions << ',' << seed << ','
          << to_string(res.result.status) << ',' << format_double(wall) << ','
          << format_double(res.result.solution.penalty) << ','
          << format_double(res.result.certified_epsilon) << ','
          << format_double(res.result.measured_epsilon) << ',' << res.result.stats.nodes
          << '\n';
      ++total;
      if (res.result.status == SolveStatus::Limit) ++timeouts;
    }
    err << "cell " << cell << ": " << timeouts << '/' << total << " hit a limit\n";
  }
  return 0;
}

namespace {

void apply_env_defaults(SolveOptions& opt) {
  const char* path = std::getenv("NASHBNB_CONFIG");
  if (!path || !*path) return;
  std::ifstream in(path);
  if (!in) return;
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return;
  if (j.contains("gap_tol")) opt.gap_tol = j["gap_tol"].get<double>();
  if (j.contains("node_limit")) opt.node_limit = j["node_limit"].get<long>();
  if (j.contains("time_limit")) opt.time_limit_s = j["time_limit"].get<double>();
  if (j.contains("workers")) opt.workers = j["workers"].get<int>();
  if (j.contains("deterministic")) opt.deterministic = j["deterministic"].get<bool>();
  if (j.contains("target_eps")) opt.target_eps = j["target_eps"].get<double>();
  if (j.contains("restarts")) opt.restarts = j["restarts"].get<int>();
  if (j.contains("local_iters")) opt.local_iters = j["local_iters"].get<int>();
  if (j.contains("normalize")) opt.normalize = j["normalize"].get<bool>();
}

void add_solve_flags(CLI::App* cmd, SolveOptions& opt) {
  cmd->add_option("--mode", opt.mode, "sbnb | sbnb-e | local-only")
      ->check(CLI::IsMember({"sbnb", "sbnb-e", "local-only"}));
  cmd->add_option("--target-eps", opt.target_eps,
                  "certified epsilon target (enables early termination)");
  cmd->add_option("--gap-tol", opt.gap_tol, "absolute optimality gap tolerance");
  cmd->add_option("--time-limit", opt.time_limit_s, "wall-clock limit in seconds");
  cmd->add_option("--node-limit", opt.node_limit, "tree node limit");
  cmd->add_option("--workers", opt.workers, "worker threads for the node loop");
  cmd->add_flag("--deterministic,!--no-deterministic", opt.deterministic,
                "single worker, wall time reported as 0");
  cmd->add_flag("--normalize", opt.normalize,
                "solve the per-player [0,1] normalization, map the certificate back");
  cmd->add_flag("--warm-start,!--no-warm-start", opt.warm_start,
                "run the local stage before the tree search");
  cmd->add_option("--seed", opt.seed, "random seed");
  cmd->add_option("--restarts", opt.restarts, "local-stage restarts");
  cmd->add_option("--local-iters", opt.local_iters, "local-stage iteration budget");
  cmd->add_option("--dump-lp", opt.dump_lp, "write the root relaxation in LP format");
  cmd->add_option("--trace", opt.trace_csv, "stage-1 trace CSV path");
  cmd->add_flag("--log-nodes", opt.log_nodes, "node progress lines on stderr");
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nash equilibria of normal-form games via penalized complementarity "
               "and spatial branch and bound"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate a game instance");
  cmd_gen->add_option("--players", gen.players, "number of players")->required();
  cmd_gen->add_option("--actions", gen.actions, "actions per player (one or per player)")
      ->required()
      ->delimiter(',');
  cmd_gen->add_option("--gen", gen.generator, "random | graphical")
      ->check(CLI::IsMember({"random", "graphical"}));
  cmd_gen->add_option("--graph", gen.graph, "complete | path | smallworld")
      ->check(CLI::IsMember({"complete", "path", "smallworld"}));
  cmd_gen->add_option("--seed", gen.seed, "random seed");
  cmd_gen->add_option("--entry-cap", gen.entry_cap, "utility tensor entry cap");
  cmd_gen->add_option("-o,--output", gen.output, "output path (.nfg or .json)");

  SolveOptions solve_opt;
  apply_env_defaults(solve_opt);
  auto* cmd_solve = app.add_subcommand("solve", "Solve a game file");
  cmd_solve->add_option("game", solve_opt.game_path, "game file (.nfg or .json)")
      ->required();
  add_solve_flags(cmd_solve, solve_opt);

  EvalOptions eval_opt;
  auto* cmd_eval = app.add_subcommand("eval", "Exploitability of a profile");
  cmd_eval->add_option("game", eval_opt.game_path, "game file")->required();
  cmd_eval->add_option("profile", eval_opt.profile_path, "profile JSON")->required();

  BenchOptions bench;
  bench.run = solve_opt;
  auto* cmd_bench = app.add_subcommand("bench", "Seeded benchmark sweep (CSV on stdout)");
  cmd_bench->add_option("--cells", bench.cells, "instance shapes, e.g. 2x4,3x3")
      ->required()
      ->delimiter(',');
  cmd_bench->add_option("--gen", bench.generator, "random | graphical")
      ->check(CLI::IsMember({"random", "graphical"}));
  cmd_bench->add_option("--graph", bench.graph, "complete | path | smallworld")
      ->check(CLI::IsMember({"complete", "path", "smallworld"}));
  cmd_bench->add_option("--seed-lo", bench.seed_lo, "first seed");
  cmd_bench->add_option("--seed-hi", bench.seed_hi, "last seed");
  add_solve_flags(cmd_bench, bench.run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen, out, err);
    if (cmd_solve->parsed()) return run_solve(solve_opt, out, err);
    if (cmd_eval->parsed()) return run_eval(eval_opt, out, err);
    if (cmd_bench->parsed()) {
      bench.run.game_path.clear();
      return run_bench(bench, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace nashbnb::cli
