#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nashbnb/sbnb.hpp"

namespace nashbnb::cli {

struct GenerateOptions {
  int players = 2;
  std::vector<int> actions;  // one entry, or one per player
  std::string generator = "random";
  std::string graph = "complete";
  uint64_t seed = 0;
  std::string output;  // empty: stdout
  long entry_cap = kDefaultEntryCap;
};

struct SolveOptions {
  std::string game_path;
  std::string mode = "sbnb";  // sbnb | sbnb-e | local-only
  double target_eps = -1.0;   // sbnb-e certified-quality target
  double gap_tol = 1e-9;
  double time_limit_s = 0.0;
  long node_limit = 1'000'000;
  int workers = 1;
  bool deterministic = false;
  bool normalize = false;  // solve the [0,1]-normalized game, map back
  bool warm_start = true;
  uint64_t seed = 0;
  int restarts = 8;
  int local_iters = 400;
  std::string dump_lp;      // write the root relaxation in LP text format
  std::string trace_csv;    // stage-1 per-restart trace
  bool log_nodes = false;   // node progress lines on stderr
};

struct EvalOptions {
  std::string game_path;
  std::string profile_path;
};

struct BenchOptions {
  std::vector<std::string> cells;  // "PxA" entries
  std::string generator = "random";
  std::string graph = "complete";
  uint64_t seed_lo = 0;
  uint64_t seed_hi = 9;
  SolveOptions run;  // per-instance settings (game_path ignored)
};

int run_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err);
int run_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err);
int run_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);

// Full argv entry point (used by the binary and by tests). Honors the
// NASHBNB_CONFIG environment variable as a JSON file of solve defaults.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nashbnb::cli
