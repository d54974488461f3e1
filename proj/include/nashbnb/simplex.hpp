#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace nashbnb {

// Sparse linear program over boxed variables: minimize c'x subject to
// rows a'x {<=,=,>=} b and finite bounds l <= x <= u.
struct LinearProgram {
  enum class Sense { LE, EQ, GE };

  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    Sense sense = Sense::LE;
    double rhs = 0.0;
  };

  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<std::string> names;  // optional, used by the text dump

  int num_vars() const { return static_cast<int>(lower.size()); }

  int add_variable(double lo, double hi, double obj = 0.0, std::string name = {});
  void add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs);

  // Largest row violation of a candidate point.
  double max_row_violation(const std::vector<double>& x) const;
};

enum class LpStatus { Optimal, Infeasible, IterationLimit, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  // Phase-1 row multipliers certifying infeasibility: y'A gives a combined
  // row that no boxed point can satisfy.
  std::vector<double> farkas;
  long iterations = 0;
};

struct SimplexOptions {
  long max_iterations = 0;  // 0: derived from problem size
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  long refactor_every = 128;
};

// Two-phase bounded-variable primal simplex on a dense tableau with periodic
// refactorization. Engages Bland's rule after 5*(rows+cols) iterations
// without objective progress.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {});

// CPLEX LP text format (minimize / subject to / bounds), for external
// cross-checking of node relaxations.
void write_lp_format(std::ostream& out, const LinearProgram& lp);

}  // namespace nashbnb
