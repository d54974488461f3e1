#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nashbnb/prng.hpp"
#include "nashbnb/simplex.hpp"
#include "test_oracles.hpp"

using namespace nashbnb;
using Sense = LinearProgram::Sense;

TEST_CASE("single variable with a lower-bounding row") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 10.0, 1.0);
  lp.add_row({{x, 1.0}}, Sense::GE, 3.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("contradictory rows are reported infeasible with a certificate") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 10.0, 1.0);
  lp.add_row({{x, 1.0}}, Sense::GE, 2.0);
  lp.add_row({{x, 1.0}}, Sense::LE, 1.0);
  LpSolution sol = solve_lp(lp);
  CHECK(sol.status == LpStatus::Infeasible);
  CHECK(sol.farkas.size() == 2);
}

TEST_CASE("equality rows and maximization via negated objective") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 4.0, -1.0);  // maximize x
  int y = lp.add_variable(0.0, 4.0, -1.0);
  lp.add_row({{x, 1.0}, {y, 2.0}}, Sense::EQ, 4.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-4.0).epsilon(1e-9));  // x=4, y=0
}

TEST_CASE("negative bounds and free-ish variables") {
  LinearProgram lp;
  int x = lp.add_variable(-5.0, 5.0, 1.0);
  int y = lp.add_variable(-5.0, 5.0, 2.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Sense::GE, -3.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  // y sits at -5, x covers the row: x >= 2.
  CHECK(sol.x[1] == doctest::Approx(-5.0));
  CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("degenerate ties do not cycle") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 1.0, -1.0);
  int y = lp.add_variable(0.0, 1.0, -1.0);
  int z = lp.add_variable(0.0, 1.0, -1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Sense::LE, 1.0);
  lp.add_row({{y, 1.0}, {z, 1.0}}, Sense::LE, 1.0);
  lp.add_row({{x, 1.0}, {z, 1.0}}, Sense::LE, 1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}, {z, 1.0}}, Sense::LE, 1.5);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-1.5).epsilon(1e-9));
}

TEST_CASE("iteration limit returns an explicit status") {
  LinearProgram lp;
  for (int j = 0; j < 6; ++j) lp.add_variable(0.0, 1.0, -1.0);
  for (int r = 0; r < 4; ++r) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 6; ++j) row.emplace_back(j, (r + 1) * (j + 1) % 5 + 1.0);
    lp.add_row(std::move(row), Sense::LE, 3.0);
  }
  SimplexOptions opt;
  opt.max_iterations = 1;
  LpSolution sol = solve_lp(lp, opt);
  CHECK(sol.status == LpStatus::IterationLimit);
}

TEST_CASE("random LPs match exhaustive vertex enumeration") {
  SplitMix64 rng(2024);
  int solved = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + static_cast<int>(rng.below(4));  // 2..5 vars
    int m = 1 + static_cast<int>(rng.below(4));  // 1..4 rows
    LinearProgram lp;
    for (int j = 0; j < n; ++j) {
      double lo = -1.0 + 2.0 * rng.uniform();
      double hi = lo + 2.0 * rng.uniform();
      lp.add_variable(lo, hi, -1.0 + 2.0 * rng.uniform());
    }
    for (int r = 0; r < m; ++r) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j)
        if (rng.uniform() < 0.8) row.emplace_back(j, std::round((-1.0 + 2.0 * rng.uniform()) * 4) / 2.0);
      if (row.empty()) row.emplace_back(0, 1.0);
      Sense sense = rng.below(4) == 0 ? Sense::EQ
                                      : (rng.below(2) == 0 ? Sense::GE : Sense::LE);
      lp.add_row(std::move(row), sense, -1.0 + 2.0 * rng.uniform());
    }

    testutil::VertexOracle oracle = testutil::vertex_enumeration(lp);
    LpSolution sol = solve_lp(lp);
    if (oracle.feasible) {
      REQUIRE_MESSAGE(sol.status == LpStatus::Optimal, "trial ", trial);
      CHECK_MESSAGE(std::abs(sol.objective - oracle.objective) <= 1e-9 * (1 + std::abs(oracle.objective)),
                    "trial ", trial, " got ", sol.objective, " want ", oracle.objective);
      CHECK(lp.max_row_violation(sol.x) <= 1e-9);
      double cx = 0.0;
      for (int j = 0; j < n; ++j) cx += lp.objective[j] * sol.x[j];
      CHECK(std::abs(cx - sol.objective) <= 1e-9);
      ++solved;
    } else {
      // The oracle found no feasible vertex; the solver must agree.
      CHECK_MESSAGE(sol.status == LpStatus::Infeasible, "trial ", trial);
      ++infeasible;
    }
  }
  CHECK(solved > 100);
  CHECK(infeasible > 20);
}

TEST_CASE("lp text dump contains the pieces external tools need") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 2.0, 1.0, "alpha");
  lp.add_variable(0.0, 1.0, 0.0);
  lp.add_row({{x, 2.0}}, Sense::GE, 1.0);
  std::ostringstream out;
  write_lp_format(out, lp);
  std::string text = out.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("alpha") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
