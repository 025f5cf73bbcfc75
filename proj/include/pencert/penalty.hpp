#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pencert/problem.hpp"
#include "pencert/types.hpp"

namespace pencert {

/// Penalty sweep over an ascending gamma grid. threshold_s is the first grid
/// gamma from which the minimizer coincides with x_bar (within match_tol)
/// for every larger grid gamma.
struct PenaltyPathResult {
  struct Entry {
    Vec argmin;
    double min_value = 0.0;
    double dist_to_xbar = 0.0;
  };
  std::vector<double> gamma_values;
  std::vector<Entry> per_gamma;
  std::optional<double> threshold_s;
};

struct MinimizeResult {
  Vec argmin;
  double min_value = 0.0;
};

struct GrowthCheckResult {
  bool holds = false;
  std::optional<Vec> witness;
  long points_checked = 0;
};

/// F(x, gamma) = f(x) + gamma*h(x) + 0.5*||x - x_bar||^2 for x in G.
/// Throws NotInG when x fails membership at feas_tol.
double penalty_value(const ProblemInstance& p, const Vec& x_bar, const Vec& x, double gamma,
                     double feas_tol = 1e-9);

/// Exhaustive minimization of F over the lattice
/// {x_bar + grid_step*z : ||x - x_bar|| <= delta} ∩ G, followed by one
/// coordinate-wise pattern-search pass at steps down to grid_step/16.
/// Ties break to the lexicographically smallest argmin. Intended for small
/// dimensions (<= 5).
MinimizeResult minimize_over(const ProblemInstance& p, const Vec& x_bar, double delta,
                             double gamma, double grid_step, double feas_tol = 1e-9);

/// Runs minimize_over for each gamma in the ascending grid and locates the
/// empirical exactness threshold.
PenaltyPathResult exactness_threshold(const ProblemInstance& p, const Vec& x_bar, double delta,
                                      const std::vector<double>& gamma_grid, double grid_step,
                                      double match_tol, double feas_tol = 1e-9);

/// Checks the linear growth property
/// F(x, gamma) >= F(x_bar, gamma) + growth_A*||x - x_bar|| - feas_tol on
/// sample_count seeded points of the delta-ball intersected with G plus the
/// full search lattice. Returns the first violator as witness.
GrowthCheckResult isolated_growth_check(const ProblemInstance& p, const Vec& x_bar, double delta,
                                        double gamma, double growth_A, long sample_count,
                                        std::uint64_t seed, double grid_step = 1e-3,
                                        double feas_tol = 1e-9);

/// Columns: gamma, argmin components, min_value, dist_to_xbar.
void write_penalty_csv(std::ostream& out, const PenaltyPathResult& result);

}  // namespace pencert
