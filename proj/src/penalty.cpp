#include "pencert/penalty.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "pencert/errors.hpp"
#include "pencert/rng.hpp"

namespace pencert {

namespace {

constexpr long kMaxLatticePoints = 80'000'000;

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double penalty_value_unchecked(const ProblemInstance& p, const Vec& x_bar, const Vec& x,
                               double gamma) {
  return evaluate_objective(p, x) + gamma * h_aggregate(p, x) + 0.5 * (x - x_bar).squaredNorm();
}

// Lattice {x_bar + step*z} ∩ ball(delta) ∩ G with cached f, h and squared
// distance per feasible point, enumerated lexicographically in z so argmin
// scans are reproducible. Built once and reused across gamma values.
class FeasibleGrid {
 public:
  FeasibleGrid(const ProblemInstance& p, const Vec& x_bar, double delta, double step,
               double feas_tol)
      : problem_(p), x_bar_(x_bar), step_(step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw Error("grid_step must be a positive real");
    if (!(delta > 0.0)) throw Error("delta must be positive");

    const int n = p.dim;
    const long half = static_cast<long>(std::floor(delta / step));
    const long side = 2 * half + 1;
    double total = 1.0;
    for (int i = 0; i < n; ++i) total *= static_cast<double>(side);
    if (total > static_cast<double>(kMaxLatticePoints))
      throw Error("search lattice has " + fmt(total) +
                  " points; shrink delta or enlarge grid_step");

    std::vector<long> z(n, -half);
    Vec x(n);
    const double delta2 = delta * delta;
    for (;;) {
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] = x_bar[i] + step_ * static_cast<double>(z[i]);
        r2 += (x[i] - x_bar[i]) * (x[i] - x_bar[i]);
      }
      if (r2 <= delta2 && classify(p, x, feas_tol).in_G) {
        f_.push_back(evaluate_objective(p, x));
        h_.push_back(h_aggregate(p, x));
        dist2_.push_back(r2);
        for (int i = 0; i < n; ++i) coords_.push_back(static_cast<std::int32_t>(z[i]));
      }
      int i = n - 1;
      while (i >= 0 && z[i] == half) z[i--] = -half;
      if (i < 0) break;
      ++z[i];
    }
    if (f_.empty()) throw EmptyFeasibleGrid("no lattice point lies in G");
  }

  std::size_t size() const { return f_.size(); }

  Vec point(std::size_t idx) const {
    const int n = problem_.dim;
    Vec x(n);
    for (int i = 0; i < n; ++i)
      x[i] = x_bar_[i] + step_ * static_cast<double>(coords_[idx * n + i]);
    return x;
  }

  double value_at(std::size_t idx, double gamma) const {
    return f_[idx] + gamma * h_[idx] + 0.5 * dist2_[idx];
  }

  // Lexicographically first strict minimum; enumeration order makes that the
  // lexicographically smallest argmin.
  std::size_t argmin(double gamma) const {
    std::size_t best = 0;
    double best_value = value_at(0, gamma);
    for (std::size_t i = 1; i < f_.size(); ++i) {
      double v = value_at(i, gamma);
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
    return best;
  }

 private:
  const ProblemInstance& problem_;
  Vec x_bar_;
  double step_;
  std::vector<double> f_, h_, dist2_;
  std::vector<std::int32_t> coords_;
};

// One coordinate-wise pattern-search pass at steps grid_step/2 .. /16.
// Candidate moves must stay inside the ball and G; the minus direction is
// preferred on ties to keep results lexicographically deterministic.
MinimizeResult refine(const ProblemInstance& p, const Vec& x_bar, double delta, double gamma,
                      double grid_step, double feas_tol, Vec x, double value) {
  const double delta2 = delta * delta;
  for (double h = grid_step / 2.0; h * 16.0 >= grid_step; h /= 2.0) {
    for (int i = 0; i < p.dim; ++i) {
      Vec best_x = x;
      double best_value = value;
      for (double dir : {-1.0, 1.0}) {
        Vec cand = x;
        cand[i] += dir * h;
        if ((cand - x_bar).squaredNorm() > delta2) continue;
        if (!classify(p, cand, feas_tol).in_G) continue;
        double v = penalty_value_unchecked(p, x_bar, cand, gamma);
        if (v < best_value) {
          best_value = v;
          best_x = cand;
        }
      }
      x = best_x;
      value = best_value;
    }
  }
  return MinimizeResult{x, value};
}

MinimizeResult minimize_on_grid(const FeasibleGrid& grid, const ProblemInstance& p,
                                const Vec& x_bar, double delta, double gamma, double grid_step,
                                double feas_tol) {
  std::size_t idx = grid.argmin(gamma);
  return refine(p, x_bar, delta, gamma, grid_step, feas_tol, grid.point(idx),
                grid.value_at(idx, gamma));
}

}  // namespace

double penalty_value(const ProblemInstance& p, const Vec& x_bar, const Vec& x, double gamma,
                     double feas_tol) {
  if (!(gamma >= 0.0)) throw Error("penalty_value: gamma must be nonnegative");
  if (!classify(p, x, feas_tol).in_G) throw NotInG("penalty_value: point is not in G");
  return penalty_value_unchecked(p, x_bar, x, gamma);
}

MinimizeResult minimize_over(const ProblemInstance& p, const Vec& x_bar, double delta, double gamma,
                             double grid_step, double feas_tol) {
  if (!(gamma >= 0.0)) throw Error("minimize_over: gamma must be nonnegative");
  FeasibleGrid grid(p, x_bar, delta, grid_step, feas_tol);
  return minimize_on_grid(grid, p, x_bar, delta, gamma, grid_step, feas_tol);
}

PenaltyPathResult exactness_threshold(const ProblemInstance& p, const Vec& x_bar, double delta,
                                      const std::vector<double>& gamma_grid, double grid_step,
                                      double match_tol, double feas_tol) {
  if (gamma_grid.empty()) throw Error("exactness_threshold: gamma grid is empty");
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    if (!(gamma_grid[i] >= 0.0)) throw Error("exactness_threshold: gamma values must be >= 0");
    if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1]))
      throw Error("exactness_threshold: gamma grid must be strictly ascending");
  }
  if (!(match_tol > 0.0)) throw Error("exactness_threshold: match_tol must be positive");
  if (!classify(p, x_bar, feas_tol).in_S)
    throw Error("exactness_threshold: x_bar must lie in S");

  FeasibleGrid grid(p, x_bar, delta, grid_step, feas_tol);

  PenaltyPathResult result;
  result.gamma_values = gamma_grid;
  for (double gamma : gamma_grid) {
    MinimizeResult m = minimize_on_grid(grid, p, x_bar, delta, gamma, grid_step, feas_tol);
    double dist = (m.argmin - x_bar).norm();
    result.per_gamma.push_back({m.argmin, m.min_value, dist});
  }

  std::size_t first_matched = result.per_gamma.size();
  for (std::size_t i = result.per_gamma.size(); i-- > 0;) {
    if (result.per_gamma[i].dist_to_xbar <= match_tol)
      first_matched = i;
    else
      break;
  }
  if (first_matched < result.per_gamma.size())
    result.threshold_s = result.gamma_values[first_matched];
  return result;
}

GrowthCheckResult isolated_growth_check(const ProblemInstance& p, const Vec& x_bar, double delta,
                                        double gamma, double growth_A, long sample_count,
                                        std::uint64_t seed, double grid_step, double feas_tol) {
  if (!(growth_A > 0.0)) throw Error("isolated_growth_check: growth constant A must be positive");
  if (!(gamma >= 0.0)) throw Error("isolated_growth_check: gamma must be nonnegative");
  if (sample_count < 0) throw Error("isolated_growth_check: sample_count must be >= 0");
  if (!classify(p, x_bar, feas_tol).in_S)
    throw Error("isolated_growth_check: x_bar must lie in S");

  const double base = penalty_value_unchecked(p, x_bar, x_bar, gamma);
  GrowthCheckResult result;
  result.holds = true;

  auto check_point = [&](const Vec& x) {
    ++result.points_checked;
    double lhs = penalty_value_unchecked(p, x_bar, x, gamma) - base;
    double rhs = growth_A * (x - x_bar).norm() - feas_tol;
    if (lhs < rhs && !result.witness) {
      result.holds = false;
      result.witness = x;
    }
  };

  SplitMix64 rng(mix_seed(seed, 0x67726F77ULL));
  long accepted = 0;
  long attempts = 0;
  const long max_attempts = 200 * std::max<long>(sample_count, 1);
  while (accepted < sample_count && attempts < max_attempts) {
    ++attempts;
    Vec x = sample_in_ball(rng, x_bar, delta);
    if (!classify(p, x, feas_tol).in_G) continue;
    ++accepted;
    check_point(x);
    if (result.witness) return result;
  }

  FeasibleGrid grid(p, x_bar, delta, grid_step, feas_tol);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_point(grid.point(i));
    if (result.witness) return result;
  }
  return result;
}

void write_penalty_csv(std::ostream& out, const PenaltyPathResult& result) {
  const Eigen::Index n = result.per_gamma.empty() ? 0 : result.per_gamma.front().argmin.size();
  out << "gamma";
  for (Eigen::Index i = 0; i < n; ++i) out << ",argmin_x" << (i + 1);
  out << ",min_value,dist_to_xbar\n";
  for (std::size_t row = 0; row < result.gamma_values.size(); ++row) {
    const auto& e = result.per_gamma[row];
    out << fmt(result.gamma_values[row]);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << fmt(e.argmin[i]);
    out << "," << fmt(e.min_value) << "," << fmt(e.dist_to_xbar) << "\n";
  }
}

}  // namespace pencert
