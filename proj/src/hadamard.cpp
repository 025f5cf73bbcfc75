#include "pencert/hadamard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pencert/errors.hpp"
#include "pencert/rng.hpp"

namespace pencert {

double SamplingSchedule::scale(int level) const { return t0 * std::pow(ratio, level); }

void SamplingSchedule::validate() const {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw Error("schedule: t0 must be a positive real");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("schedule: ratio must lie in (0,1)");
  if (levels < 1) throw Error("schedule: levels must be >= 1");
  if (samples_per_level < 1) throw Error("schedule: samples_per_level must be >= 1");
  if (!(dir_radius_factor > 0.0) || !std::isfinite(dir_radius_factor))
    throw Error("schedule: dir_radius_factor must be a positive real");
  if (scale(levels - 1) < std::numeric_limits<double>::min())
    throw Error("schedule: deepest scale underflows");
}

namespace {

// Walks the analysis window of the ladder once. phi may be null when only
// admissibility matters (tangent cone tests); the perturbation stream depends
// solely on (seed, level), so estimates and membership tests see identical
// samples.
std::vector<LevelStat> ladder_stats(const ScalarFn* phi, const SetOracle& in_set, const Vec& x,
                                    const Vec& u, const SamplingSchedule& sched) {
  sched.validate();
  if (!in_set(x)) throw Error("lower_hadamard: base point fails set membership");
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i])) throw Error("lower_hadamard: direction has non-finite components");

  const double phi_x = phi ? (*phi)(x) : 0.0;
  std::vector<LevelStat> stats;
  stats.reserve(sched.levels - sched.window_begin());

  for (int k = sched.window_begin(); k < sched.levels; ++k) {
    const double t = sched.scale(k);
    const double radius = sched.dir_radius_factor * t;
    SplitMix64 rng(mix_seed(sched.seed, static_cast<std::uint64_t>(k)));

    LevelStat stat;
    stat.scale = t;
    stat.min_quotient = std::numeric_limits<double>::infinity();
    stat.max_quotient = -std::numeric_limits<double>::infinity();

    for (int s = 0; s <= sched.samples_per_level; ++s) {
      const Vec dir = (s == 0) ? u : Vec(sample_in_ball(rng, u, radius));
      const Vec point = x + t * dir;
      if (!in_set(point)) continue;
      ++stat.admissible;
      if (!phi) continue;
      double q;
      try {
        q = ((*phi)(point)-phi_x) / t;
      } catch (const DomainError& e) {
        std::ostringstream msg;
        msg << "phi failed at an admissible sample (level " << k << ", t = " << t
            << "): " << e.what();
        throw DomainError(msg.str());
      }
      if (!std::isfinite(q)) {
        std::ostringstream msg;
        msg << "difference quotient overflowed (level " << k << ", t = " << t << ")";
        throw DomainError(msg.str());
      }
      stat.min_quotient = std::min(stat.min_quotient, q);
      stat.max_quotient = std::max(stat.max_quotient, q);
    }
    stats.push_back(stat);
  }
  return stats;
}

DerivativeEstimate estimate_from(std::vector<LevelStat> stats) {
  DerivativeEstimate est;
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const LevelStat& s : stats) {
    est.admissible_samples += s.admissible;
    if (s.admissible > 0) {
      any = true;
      best = std::min(best, s.min_quotient);
    }
  }
  est.value = any ? ExtReal::finite(best) : ExtReal::pos_inf();
  est.level_minima = std::move(stats);
  return est;
}

}  // namespace

DerivativeEstimate lower_hadamard(const ScalarFn& phi, const SetOracle& in_set, const Vec& x,
                                  const Vec& u, const SamplingSchedule& sched) {
  return estimate_from(ladder_stats(&phi, in_set, x, u, sched));
}

DiffCheckResult hadamard_diff_check(const ScalarFn& phi, const SetOracle& in_set, const Vec& x,
                                    const Vec& u, const SamplingSchedule& sched, double tol) {
  if (!(tol > 0.0)) throw Error("hadamard_diff_check: tol must be positive");
  DiffCheckResult result;
  result.estimate = estimate_from(ladder_stats(&phi, in_set, x, u, sched));

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool every_level = true;
  for (const LevelStat& s : result.estimate.level_minima) {
    if (s.admissible == 0) {
      every_level = false;
      break;
    }
    lo = std::min(lo, s.min_quotient);
    hi = std::max(hi, s.max_quotient);
  }

  if (every_level && hi - lo <= tol) {
    result.differentiable = true;
    result.value = ExtReal::finite(0.5 * (lo + hi));
  } else {
    result.differentiable = false;
    result.value = result.estimate.value;
  }
  return result;
}

bool tangent_cone_member(const SetOracle& in_set, const Vec& x, const Vec& u,
                         const SamplingSchedule& sched) {
  std::vector<LevelStat> stats = ladder_stats(nullptr, in_set, x, u, sched);
  return std::all_of(stats.begin(), stats.end(),
                     [](const LevelStat& s) { return s.admissible > 0; });
}

std::vector<Vec> sample_unit_directions(int count, int dim, std::uint64_t seed) {
  if (count < 1) throw Error("sample_unit_directions: count must be >= 1");
  if (dim < 1) throw Error("sample_unit_directions: dim must be >= 1");

  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    if (count > 1) dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }

  for (int i = 0; i < dim && static_cast<int>(dirs.size()) < count; ++i) {
    for (double sign : {1.0, -1.0}) {
      if (static_cast<int>(dirs.size()) >= count) break;
      Vec axis = Vec::Zero(dim);
      axis[i] = sign;
      dirs.push_back(axis);
    }
  }
  SplitMix64 rng(mix_seed(seed, 0x646972ULL));
  while (static_cast<int>(dirs.size()) < count) dirs.push_back(sample_unit_vector(rng, dim));
  return dirs;
}

}  // namespace pencert
