#pragma once

#include <cstdint>
#include <vector>

#include "pencert/extended_real.hpp"
#include "pencert/types.hpp"

namespace pencert {

/// Geometric scale ladder for estimating limits of difference quotients as
/// (t, u') -> (+0, u). Level k uses step t_k = t0 * ratio^k and perturbs the
/// direction inside a ball of radius dir_radius_factor * t_k, so the
/// direction neighbourhood shrinks together with the step.
///
/// Quotients are collected on the deepest ceil(levels/2) rungs only; the
/// coarser rungs are excluded so the estimate reflects limiting behaviour
/// rather than finite-scale quotients. All sampling is deterministic given
/// the seed.
struct SamplingSchedule {
  double t0 = 1e-1;
  double ratio = 0.5;
  int levels = 20;
  int samples_per_level = 64;
  double dir_radius_factor = 1.0;
  std::uint64_t seed = 0;

  double scale(int level) const;

  /// First ladder index of the analysis window (the deepest ceil(levels/2)
  /// rungs are [window_begin, levels)).
  int window_begin() const { return levels - (levels + 1) / 2; }

  /// Throws Error unless t0 > 0, 0 < ratio < 1, levels >= 1, samples >= 1,
  /// dir_radius_factor > 0 and the deepest scale is a positive normal double.
  void validate() const;
};

/// Per-scale sampling statistics. min/max quotients are meaningful only when
/// admissible > 0.
struct LevelStat {
  double scale = 0.0;
  double min_quotient = 0.0;
  double max_quotient = 0.0;
  int admissible = 0;
};

/// Estimate of a lower Hadamard conditional derivative. `value` is the
/// minimum over all recorded level minima, or PosInf when no admissible
/// sample exists (the direction is not recognized as tangent).
struct DerivativeEstimate {
  ExtReal value = ExtReal::pos_inf();
  long admissible_samples = 0;
  std::vector<LevelStat> level_minima;
};

struct DiffCheckResult {
  bool differentiable = false;
  ExtReal value = ExtReal::pos_inf();
  DerivativeEstimate estimate;
};

/// Estimates liminf of (phi(x + t u') - phi(x)) / t over (t, u') -> (+0, u)
/// restricted to x + t u' in the set. At each window level the unperturbed u
/// and samples_per_level ball perturbations are probed; inadmissible points
/// are skipped. The finite-sample minimum can only upper-bound the true
/// liminf over the sampled region.
///
/// Pre: x is in the set. A DomainError raised by phi at an admissible sample
/// aborts with level/step diagnostics attached.
DerivativeEstimate lower_hadamard(const ScalarFn& phi, const SetOracle& in_set, const Vec& x,
                                  const Vec& u, const SamplingSchedule& sched);

/// Tests whether the full limit of the quotients exists in direction u:
/// differentiable iff every window level has an admissible sample and the
/// spread between the largest and smallest admissible quotients across the
/// window is at most tol. The value is the midpoint of that range when
/// differentiable, otherwise the lower estimate.
DiffCheckResult hadamard_diff_check(const ScalarFn& phi, const SetOracle& in_set, const Vec& x,
                                    const Vec& u, const SamplingSchedule& sched, double tol);

/// Witness-based membership of u in the Bouligand tangent cone of the set at
/// x: true iff every window level admits a sampled point x + t_k u' in the
/// set, witnessing sequences t_k -> +0, u_k -> u.
bool tangent_cone_member(const SetOracle& in_set, const Vec& x, const Vec& u,
                         const SamplingSchedule& sched);

/// Deterministic quasi-uniform unit directions: {+1, -1} in dimension one;
/// otherwise the +-coordinate axes first, then seeded isotropic samples.
std::vector<Vec> sample_unit_directions(int count, int dim, std::uint64_t seed);

}  // namespace pencert
