#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pencert/extended_real.hpp"
#include "pencert/hadamard.hpp"
#include "pencert/problem.hpp"
#include "pencert/types.hpp"

namespace pencert {

/// Estimated derivative components within this margin of zero count as zero
/// when certificates classify signs. Matches the accuracy the estimator
/// delivers on the analytic catalog.
inline constexpr double kZeroTol = 5e-2;

/// Spread threshold for declaring a direction Hadamard differentiable.
inline constexpr double kDiffSpreadTol = 1e-2;

/// Derivative data of one direction: alpha0 estimates the penalty function's
/// lower Hadamard derivative over X at x_bar; alpha[i] the Hadamard
/// derivative of the i-th active inequality constraint (sorted active set).
struct DerivativeVector {
  ExtReal alpha0 = ExtReal::pos_inf();
  std::vector<ExtReal> alpha;
  Vec direction;
  double gamma_used = 0.0;
};

enum class CertificateKind { Nonstrict, Strict };

/// Multiplier vector paired with a direction's derivative data. lambda has
/// one entry per component of (alpha0, alpha), is nonnegative, not all zero,
/// and zero on every -inf component. Nonstrict pairings are nonnegative and
/// strict pairings strictly positive, up to kZeroTol on estimated data.
struct Certificate {
  std::vector<double> lambda;
  CertificateKind kind = CertificateKind::Nonstrict;
  Vec direction;
  ExtReal pairing_value = ExtReal::pos_inf();
};

struct SeparationCertificate {
  double lambda = 0.0;
  std::vector<double> mu;
};

struct CqReport {
  std::vector<Vec> sampled_points;
  std::vector<ExtReal> d_hat;
  ExtReal worst = ExtReal::neg_inf();  // largest margin
  bool pass = false;
};

struct FritzJohnResult {
  /// nullopt: the necessary condition is violated in this direction, so the
  /// candidate cannot be a local minimizer under the theorem's hypotheses.
  std::optional<Certificate> certificate;
  DerivativeVector alpha;
  std::vector<std::string> warnings;
};

struct DirectionVerdict {
  DerivativeVector alpha;
  std::optional<Certificate> certificate;
};

struct IsolatedResult {
  bool certified = false;
  std::vector<DirectionVerdict> per_direction;
  std::vector<std::string> warnings;
};

struct AbadieDirection {
  Vec direction;
  bool in_tangent = false;     // u in T(G, x_bar)
  bool in_linearized = false;  // u in C(x_bar)
};

struct AbadieResult {
  bool pass = false;
  std::vector<AbadieDirection> per_direction;
  std::vector<Vec> mismatches;
};

/// Margin d(x): minimum over sampled unit directions u in T(G, x) of the
/// lower Hadamard derivative of the aggregate h over X at x. PosInf when no
/// sampled direction is recognized as tangent. Throws NotInG off G.
ExtReal cq_margin(const ProblemInstance& p, const Vec& x, int dir_count,
                  const SamplingSchedule& sched, double feas_tol = 1e-9);

/// Samples points of the delta-neighbourhood of x_bar inside G but off S
/// (aggregate h above feas_tol^2) and evaluates cq_margin at each; passes iff
/// every margin is <= -a. Throws NoOffSPoints when no off-S point is found.
CqReport check_cq(const ProblemInstance& p, const Candidate& cand, double a, int point_count,
                  int dir_count, const SamplingSchedule& sched, std::uint64_t seed);

/// Decides whether (a, b) lies outside [-inf,0]^{1+p} and, when it does,
/// returns multipliers with lambda*a + <mu, b> > 0: weight 1 on one strictly
/// positive component (finite preferred, then lowest index), zero elsewhere,
/// and zero on every -inf component. Components count as strictly positive
/// above strict_tol.
std::optional<SeparationCertificate> separation_certificate(ExtReal a,
                                                            const std::vector<ExtReal>& b,
                                                            double strict_tol = 0.0);

/// Nonstrict certificate for one direction: builds the derivative vector of
/// the penalty function and the active constraints, then looks for a
/// component that is nonnegative (above -kZeroTol, or +inf). Active
/// constraints failing the differentiability check are surfaced as warnings
/// and enter through their lower estimates.
FritzJohnResult fritz_john_at(const ProblemInstance& p, const Candidate& cand, const Vec& u,
                              double gamma, const SamplingSchedule& sched);

/// Strict certificates over a sampled set of directions; certified iff every
/// direction admits one.
IsolatedResult isolated_sufficient(const ProblemInstance& p, const Candidate& cand, double gamma,
                                   int dir_count, const SamplingSchedule& sched,
                                   std::uint64_t seed);

/// Compares the tangent cone of G with the cone of tangent-to-X directions
/// along which every active constraint has nonpositive derivative, over
/// sampled directions.
AbadieResult abadie_check(const ProblemInstance& p, const Candidate& cand, int dir_count,
                          const SamplingSchedule& sched, std::uint64_t seed);

}  // namespace pencert
