#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "pencert/expr.hpp"
#include "pencert/types.hpp"

namespace pencert {

/// Constrained problem
///
///   minimize f(x)  subject to  x in X,  g_i(x) <= 0,  h_j(x) = 0
///
/// where X is a box intersected with extra non-strict expression constraints
/// c(x) <= 0, so it is closed by construction.
struct ProblemInstance {
  int dim = 0;
  ExprPtr objective;
  std::vector<ExprPtr> inequalities;     // g_i
  std::vector<ExprPtr> equalities;       // h_j
  Vec box_lower;                         // entries may be -inf
  Vec box_upper;                         // entries may be +inf
  std::vector<ExprPtr> set_constraints;  // part of X, c(x) <= 0
  std::optional<double> lipschitz;       // metadata only, never computed with
};

/// Candidate minimizer with its neighbourhood radius and feasibility
/// tolerance. Validated to lie in S at load time.
struct Candidate {
  Vec x_bar;
  double delta = 0.0;
  double feas_tol = 1e-9;
};

struct Classification {
  bool in_X = false;
  bool in_G = false;
  bool in_S = false;
  std::vector<int> active_set;  // 1-based indices i with |g_i(x)| <= tol
};

struct LoadedProblem {
  ProblemInstance problem;
  Candidate candidate;
};

/// Reads a problem file (see README for the format). Throws IoError,
/// FormatError, or a parse error with location. The candidate point must
/// classify as in_S at its feas_tol or the load is rejected.
LoadedProblem load_problem(const std::filesystem::path& path);

/// Tolerance-based membership: in_X iff box and extra set constraints hold
/// within tol; in_G iff additionally g_i(x) <= tol for all i; in_S iff
/// additionally h(x) <= tol^2. Active set uses the two-sided test
/// |g_i(x)| <= tol.
Classification classify(const ProblemInstance& p, const Vec& x, double tol);

/// Aggregate equality violation h(x) = sum_j h_j(x)^2; zero when there are
/// no equality constraints.
double h_aggregate(const ProblemInstance& p, const Vec& x);

double evaluate_objective(const ProblemInstance& p, const Vec& x);

/// Membership oracles thickened by tol, for use as sampling sets. A point
/// where a constraint expression fails to evaluate is treated as outside.
SetOracle membership_X(const ProblemInstance& p, double tol);
SetOracle membership_G(const ProblemInstance& p, double tol);
SetOracle membership_S(const ProblemInstance& p, double tol);

/// The objective and the aggregate h as scalar fields.
ScalarFn objective_fn(const ProblemInstance& p);
ScalarFn h_fn(const ProblemInstance& p);

}  // namespace pencert
