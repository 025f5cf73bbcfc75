#include "pencert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pencert/errors.hpp"
#include "pencert/rng.hpp"

namespace pencert {

namespace {

void require_valid_candidate(const ProblemInstance& p, const Candidate& cand) {
  if (!classify(p, cand.x_bar, cand.feas_tol).in_S)
    throw Error("candidate point is not feasible at its feas_tol");
}

ScalarFn penalty_fn(const ProblemInstance& p, const Vec& x_bar, double gamma) {
  return [&p, x_bar, gamma](const Vec& x) {
    return evaluate_objective(p, x) + gamma * h_aggregate(p, x) +
           0.5 * (x - x_bar).squaredNorm();
  };
}

bool nonneg_within(ExtReal v, double tol) {
  return v.is_pos_inf() || (v.is_finite() && v.finite_value() >= -tol);
}

bool strictly_positive(ExtReal v, double tol) {
  return v.is_pos_inf() || (v.is_finite() && v.finite_value() > tol);
}

/// Derivative data for one direction, shared by the nonstrict and strict
/// certificate builders.
DerivativeVector build_derivative_vector(const ProblemInstance& p, const Candidate& cand,
                                         const Vec& u, double gamma,
                                         const SamplingSchedule& sched,
                                         std::vector<std::string>& warnings) {
  const SetOracle in_X = membership_X(p, cand.feas_tol);
  const std::vector<int> active = classify(p, cand.x_bar, cand.feas_tol).active_set;

  DerivativeVector dv;
  dv.direction = u;
  dv.gamma_used = gamma;
  dv.alpha0 = lower_hadamard(penalty_fn(p, cand.x_bar, gamma), in_X, cand.x_bar, u, sched).value;

  dv.alpha.reserve(active.size());
  for (int idx : active) {
    const ExprPtr& g = p.inequalities[idx - 1];
    ScalarFn g_fn = [&g](const Vec& x) { return evaluate(*g, x); };
    DiffCheckResult dc = hadamard_diff_check(g_fn, in_X, cand.x_bar, u, sched, kDiffSpreadTol);
    if (!dc.differentiable) {
      std::ostringstream msg;
      msg << "active constraint g" << idx
          << " fails the Hadamard differentiability check in a sampled direction; "
             "using its lower estimate";
      warnings.push_back(msg.str());
    }
    dv.alpha.push_back(dc.value);
  }
  return dv;
}

std::vector<ExtReal> components_of(const DerivativeVector& dv) {
  std::vector<ExtReal> comps;
  comps.reserve(dv.alpha.size() + 1);
  comps.push_back(dv.alpha0);
  comps.insert(comps.end(), dv.alpha.begin(), dv.alpha.end());
  return comps;
}

}  // namespace

ExtReal cq_margin(const ProblemInstance& p, const Vec& x, int dir_count,
                  const SamplingSchedule& sched, double feas_tol) {
  if (dir_count < 1) throw Error("cq_margin: dir_count must be >= 1");
  if (!classify(p, x, feas_tol).in_G) throw NotInG("cq_margin: point is not in G");

  const SetOracle in_G = membership_G(p, feas_tol);
  const SetOracle in_X = membership_X(p, feas_tol);
  const ScalarFn h = h_fn(p);

  ExtReal margin = ExtReal::pos_inf();
  for (const Vec& u : sample_unit_directions(dir_count, p.dim, sched.seed)) {
    if (!tangent_cone_member(in_G, x, u, sched)) continue;
    ExtReal value = lower_hadamard(h, in_X, x, u, sched).value;
    margin = std::min(margin, value);
  }
  return margin;
}

CqReport check_cq(const ProblemInstance& p, const Candidate& cand, double a, int point_count,
                  int dir_count, const SamplingSchedule& sched, std::uint64_t seed) {
  if (!(a > 0.0)) throw Error("check_cq: a must be positive");
  if (point_count < 1) throw Error("check_cq: point_count must be >= 1");
  require_valid_candidate(p, cand);

  const double off_s_floor = cand.feas_tol * cand.feas_tol;
  SplitMix64 rng(mix_seed(seed, 0x6371ULL));

  CqReport report;
  long attempts = 0;
  const long max_attempts = 200 * static_cast<long>(point_count);
  while (static_cast<int>(report.sampled_points.size()) < point_count &&
         attempts < max_attempts) {
    ++attempts;
    Vec x = sample_in_ball(rng, cand.x_bar, cand.delta);
    if (!membership_G(p, cand.feas_tol)(x)) continue;
    if (!(h_aggregate(p, x) > off_s_floor)) continue;
    report.sampled_points.push_back(std::move(x));
  }
  if (report.sampled_points.empty())
    throw NoOffSPoints("check_cq: no feasible point off S found near the candidate");

  report.pass = true;
  report.worst = ExtReal::neg_inf();
  const ExtReal bound = ExtReal::finite(-a);
  for (const Vec& x : report.sampled_points) {
    ExtReal margin = cq_margin(p, x, dir_count, sched, cand.feas_tol);
    report.worst = std::max(report.worst, margin);
    if (!(margin <= bound)) report.pass = false;
    report.d_hat.push_back(margin);
  }
  return report;
}

std::optional<SeparationCertificate> separation_certificate(ExtReal a,
                                                            const std::vector<ExtReal>& b,
                                                            double strict_tol) {
  const std::size_t p = b.size();
  SeparationCertificate cert;
  cert.mu.assign(p, 0.0);

  // One multiplier on a strictly positive component, finite ones first.
  for (int pass = 0; pass < 2; ++pass) {
    const bool want_finite = (pass == 0);
    if (strictly_positive(a, strict_tol) && a.is_finite() == want_finite) {
      cert.lambda = 1.0;
      return cert;
    }
    for (std::size_t i = 0; i < p; ++i) {
      if (strictly_positive(b[i], strict_tol) && b[i].is_finite() == want_finite) {
        cert.mu[i] = 1.0;
        return cert;
      }
    }
  }
  return std::nullopt;
}

FritzJohnResult fritz_john_at(const ProblemInstance& p, const Candidate& cand, const Vec& u,
                              double gamma, const SamplingSchedule& sched) {
  if (!(gamma >= 0.0)) throw Error("fritz_john_at: gamma must be nonnegative");
  require_valid_candidate(p, cand);

  FritzJohnResult result;
  result.alpha = build_derivative_vector(p, cand, u, gamma, sched, result.warnings);

  const std::vector<ExtReal> comps = components_of(result.alpha);
  std::vector<double> lambda(comps.size(), 0.0);

  // Prefer one finite nonnegative component; otherwise weight every +inf
  // component. -inf components always keep a zero multiplier.
  int finite_pick = -1;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (comps[i].is_finite() && nonneg_within(comps[i], kZeroTol)) {
      finite_pick = static_cast<int>(i);
      break;
    }
  }
  bool any = false;
  if (finite_pick >= 0) {
    lambda[finite_pick] = 1.0;
    any = true;
  } else {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (comps[i].is_pos_inf()) {
        lambda[i] = 1.0;
        any = true;
      }
    }
  }
  if (!any) return result;  // violated in this direction

  Certificate cert;
  cert.lambda = std::move(lambda);
  cert.kind = CertificateKind::Nonstrict;
  cert.direction = u;
  cert.pairing_value = xdot(cert.lambda, comps);
  if (!nonneg_within(cert.pairing_value, kZeroTol))
    throw Error("fritz_john_at: constructed certificate fails its pairing invariant");
  result.certificate = std::move(cert);
  return result;
}

IsolatedResult isolated_sufficient(const ProblemInstance& p, const Candidate& cand, double gamma,
                                   int dir_count, const SamplingSchedule& sched,
                                   std::uint64_t seed) {
  if (!(gamma >= 0.0)) throw Error("isolated_sufficient: gamma must be nonnegative");
  if (dir_count < 1) throw Error("isolated_sufficient: dir_count must be >= 1");
  require_valid_candidate(p, cand);

  IsolatedResult result;
  result.certified = true;
  for (const Vec& u : sample_unit_directions(dir_count, p.dim, seed)) {
    DirectionVerdict verdict;
    verdict.alpha = build_derivative_vector(p, cand, u, gamma, sched, result.warnings);

    auto sep = separation_certificate(verdict.alpha.alpha0, verdict.alpha.alpha, kZeroTol);
    if (!sep) {
      result.certified = false;
    } else {
      Certificate cert;
      cert.lambda.reserve(sep->mu.size() + 1);
      cert.lambda.push_back(sep->lambda);
      cert.lambda.insert(cert.lambda.end(), sep->mu.begin(), sep->mu.end());
      cert.kind = CertificateKind::Strict;
      cert.direction = u;
      cert.pairing_value = xdot(cert.lambda, components_of(verdict.alpha));
      if (!strictly_positive(cert.pairing_value, 0.0))
        throw Error("isolated_sufficient: constructed certificate fails its pairing invariant");
      verdict.certificate = std::move(cert);
    }
    result.per_direction.push_back(std::move(verdict));
  }
  return result;
}

AbadieResult abadie_check(const ProblemInstance& p, const Candidate& cand, int dir_count,
                          const SamplingSchedule& sched, std::uint64_t seed) {
  if (dir_count < 1) throw Error("abadie_check: dir_count must be >= 1");
  require_valid_candidate(p, cand);

  const SetOracle in_G = membership_G(p, cand.feas_tol);
  const SetOracle in_X = membership_X(p, cand.feas_tol);
  const std::vector<int> active = classify(p, cand.x_bar, cand.feas_tol).active_set;

  AbadieResult result;
  result.pass = true;
  for (const Vec& u : sample_unit_directions(dir_count, p.dim, seed)) {
    AbadieDirection dir;
    dir.direction = u;
    dir.in_tangent = tangent_cone_member(in_G, cand.x_bar, u, sched);

    dir.in_linearized = tangent_cone_member(in_X, cand.x_bar, u, sched);
    for (int idx : active) {
      if (!dir.in_linearized) break;
      const ExprPtr& g = p.inequalities[idx - 1];
      ScalarFn g_fn = [&g](const Vec& x) { return evaluate(*g, x); };
      DiffCheckResult dc = hadamard_diff_check(g_fn, in_X, cand.x_bar, u, sched, kDiffSpreadTol);
      if (!(dc.value <= ExtReal::finite(kZeroTol))) dir.in_linearized = false;
    }

    if (dir.in_tangent != dir.in_linearized) {
      result.pass = false;
      result.mismatches.push_back(u);
    }
    result.per_direction.push_back(std::move(dir));
  }
  return result;
}

}  // namespace pencert
