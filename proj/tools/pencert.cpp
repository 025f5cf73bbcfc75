// pencert: command-line probes for optimality properties of candidate points
// of nonsmooth constrained problems. Every command loads a problem file,
// runs one pipeline, writes a JSON report, and encodes its verdict in the
// exit code: 0 pass, 1 fail, 2 input or runtime error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pencert/certify.hpp"
#include "pencert/errors.hpp"
#include "pencert/hadamard.hpp"
#include "pencert/penalty.hpp"
#include "pencert/problem.hpp"
#include "pencert/report.hpp"

namespace {

using namespace pencert;

struct CommonOpts {
  std::string problem_path;
  std::string out_path;
  SamplingSchedule sched;
  std::uint64_t seed = 0;
  int dirs = 64;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("problem", o.problem_path, "problem file")->required();
  cmd->add_option("--out", o.out_path, "write the JSON report to this path (default: stdout)");
  cmd->add_option("--t0", o.sched.t0, "coarsest ladder scale")->check(CLI::PositiveNumber);
  cmd->add_option("--ratio", o.sched.ratio, "ladder shrink ratio, in (0,1)")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--levels", o.sched.levels, "ladder levels")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", o.sched.samples_per_level, "direction samples per level")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "seed for all sampling");
  cmd->add_option("--dirs", o.dirs, "number of probe directions")->check(CLI::PositiveNumber);
}

json common_config(const CommonOpts& o) {
  return json{{"problem", o.problem_path},
              {"schedule", schedule_json(o.sched)},
              {"dirs", o.dirs},
              {"seed", o.seed}};
}

struct Report {
  json body;
  bool pass = false;
};

json make_report(const std::string& command, json config, const std::string& digest,
                 json results, bool pass, std::vector<std::string> warnings) {
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  return json{{"command", command},       {"config", std::move(config)},
              {"problem_digest", digest}, {"results", std::move(results)},
              {"verdict", pass ? "pass" : "fail"},
              {"warnings", std::move(warnings)},
              {"timestamp", utc_timestamp()}};
}

std::vector<double> make_gamma_grid(double gamma_max, double gamma_step) {
  if (!(gamma_step > 0.0)) throw Error("gamma-step must be positive");
  if (!(gamma_max >= 0.0)) throw Error("gamma-max must be nonnegative");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    double g = k * gamma_step;
    if (g > gamma_max + 1e-12) break;
    grid.push_back(g);
  }
  return grid;
}

// Penalty weight for certificate construction: an explicit --gamma wins;
// otherwise one unit above the empirical exactness threshold.
double resolve_gamma(const LoadedProblem& lp, std::optional<double> gamma_flag, double gamma_max,
                     double gamma_step, double grid_step, double match_tol, json& config,
                     std::vector<std::string>& warnings) {
  if (gamma_flag) {
    config["gamma"] = *gamma_flag;
    config["gamma_source"] = "flag";
    return *gamma_flag;
  }
  PenaltyPathResult path =
      exactness_threshold(lp.problem, lp.candidate.x_bar, lp.candidate.delta,
                          make_gamma_grid(gamma_max, gamma_step), grid_step, match_tol,
                          lp.candidate.feas_tol);
  if (!path.threshold_s)
    throw Error("no exactness threshold found on the default gamma grid; pass --gamma");
  double gamma = *path.threshold_s + 1.0;
  config["gamma"] = gamma;
  config["gamma_source"] = "exactness_threshold+1";
  warnings.push_back("gamma resolved from the empirical exactness threshold");
  return gamma;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

Report run_derivative(const CommonOpts& o, const LoadedProblem& lp) {
  const ProblemInstance& p = lp.problem;
  const Candidate& cand = lp.candidate;
  const SetOracle in_S = membership_S(p, cand.feas_tol);
  const ScalarFn f = objective_fn(p);

  json rows = json::array();
  bool all_nonneg = true;
  for (const Vec& u : sample_unit_directions(o.dirs, p.dim, o.seed)) {
    DerivativeEstimate est = lower_hadamard(f, in_S, cand.x_bar, u, o.sched);
    if (!(est.value >= ExtReal::finite(-kZeroTol))) all_nonneg = false;
    rows.push_back(json{{"direction", vec_json(u)}, {"estimate", estimate_json(est)}});
  }

  json results{{"per_direction", std::move(rows)},
               {"criterion", "lower Hadamard derivative of f over S is >= 0 in every direction"},
               {"zero_tol", kZeroTol}};
  return Report{make_report("derivative", common_config(o), file_digest_hex(o.problem_path),
                            std::move(results), all_nonneg, {}),
                all_nonneg};
}

Report run_tangent(const CommonOpts& o, const LoadedProblem& lp) {
  const ProblemInstance& p = lp.problem;
  const Candidate& cand = lp.candidate;
  const SetOracle in_G = membership_G(p, cand.feas_tol);

  json rows = json::array();
  int members = 0;
  for (const Vec& u : sample_unit_directions(o.dirs, p.dim, o.seed)) {
    bool member = tangent_cone_member(in_G, cand.x_bar, u, o.sched);
    members += member ? 1 : 0;
    rows.push_back(json{{"direction", vec_json(u)}, {"in_tangent_cone", member}});
  }

  json results{{"per_direction", std::move(rows)}, {"member_count", members}};
  return Report{make_report("tangent", common_config(o), file_digest_hex(o.problem_path),
                            std::move(results), true, {}),
                true};
}

Report run_penalty_path(const CommonOpts& o, const LoadedProblem& lp, double gamma_max,
                        double gamma_step, double grid_step, double match_tol) {
  const Candidate& cand = lp.candidate;
  PenaltyPathResult path =
      exactness_threshold(lp.problem, cand.x_bar, cand.delta,
                          make_gamma_grid(gamma_max, gamma_step), grid_step, match_tol,
                          cand.feas_tol);

  std::filesystem::path csv_path =
      o.out_path.empty() ? std::filesystem::path("penalty_path.csv")
                         : std::filesystem::path(o.out_path).replace_extension(".csv");
  std::ostringstream csv;
  write_penalty_csv(csv, path);
  write_text_file(csv_path, csv.str());

  json config = common_config(o);
  config["gamma_max"] = gamma_max;
  config["gamma_step"] = gamma_step;
  config["grid_step"] = grid_step;
  config["match_tol"] = match_tol;

  json results = penalty_path_json(path);
  results["csv_path"] = csv_path.string();

  bool pass = path.threshold_s.has_value();
  return Report{make_report("penalty-path", std::move(config), file_digest_hex(o.problem_path),
                            std::move(results), pass, {}),
                pass};
}

Report run_check_cq(const CommonOpts& o, const LoadedProblem& lp, double a, int points) {
  CqReport cq = check_cq(lp.problem, lp.candidate, a, points, o.dirs, o.sched, o.seed);

  std::vector<std::string> warnings;
  if (static_cast<int>(cq.sampled_points.size()) < points)
    warnings.push_back("found only " + std::to_string(cq.sampled_points.size()) + " of " +
                       std::to_string(points) + " requested off-S points");

  json config = common_config(o);
  config["a"] = a;
  config["points"] = points;
  return Report{make_report("check-cq", std::move(config), file_digest_hex(o.problem_path),
                            cq_report_json(cq), cq.pass, std::move(warnings)),
                cq.pass};
}

Report run_certify_fj(const CommonOpts& o, const LoadedProblem& lp, json config, double gamma,
                      std::vector<std::string> warnings) {
  const ProblemInstance& p = lp.problem;

  json rows = json::array();
  bool pass = true;
  for (const Vec& u : sample_unit_directions(o.dirs, p.dim, o.seed)) {
    FritzJohnResult fj = fritz_john_at(p, lp.candidate, u, gamma, o.sched);
    for (auto& w : fj.warnings) warnings.push_back(std::move(w));
    json row{{"direction", vec_json(u)},
             {"alpha", derivative_vector_json(fj.alpha)},
             {"violated", !fj.certificate.has_value()}};
    if (fj.certificate) row["certificate"] = certificate_json(*fj.certificate);
    if (!fj.certificate) pass = false;
    rows.push_back(std::move(row));
  }

  json results{{"per_direction", std::move(rows)}};
  return Report{make_report("certify-fj", std::move(config), file_digest_hex(o.problem_path),
                            std::move(results), pass, std::move(warnings)),
                pass};
}

Report run_certify_isolated(const CommonOpts& o, const LoadedProblem& lp, json config,
                            double gamma, std::optional<double> growth_A, long points,
                            double grid_step, std::vector<std::string> warnings) {
  IsolatedResult iso =
      isolated_sufficient(lp.problem, lp.candidate, gamma, o.dirs, o.sched, o.seed);
  for (auto& w : iso.warnings) warnings.push_back(std::move(w));

  json rows = json::array();
  for (const DirectionVerdict& v : iso.per_direction) {
    json row{{"direction", vec_json(v.alpha.direction)},
             {"alpha", derivative_vector_json(v.alpha)},
             {"certified", v.certificate.has_value()}};
    if (v.certificate) row["certificate"] = certificate_json(*v.certificate);
    rows.push_back(std::move(row));
  }

  bool pass = iso.certified;
  json results{{"per_direction", std::move(rows)}, {"certified", iso.certified}};

  if (growth_A) {
    GrowthCheckResult growth =
        isolated_growth_check(lp.problem, lp.candidate.x_bar, lp.candidate.delta, gamma,
                              *growth_A, points, o.seed, grid_step, lp.candidate.feas_tol);
    json g{{"holds", growth.holds}, {"points_checked", growth.points_checked}};
    if (growth.witness) g["witness"] = vec_json(*growth.witness);
    results["growth"] = std::move(g);
    pass = pass && growth.holds;
  }

  return Report{make_report("certify-isolated", std::move(config),
                            file_digest_hex(o.problem_path), std::move(results), pass,
                            std::move(warnings)),
                pass};
}

Report run_check_abadie(const CommonOpts& o, const LoadedProblem& lp) {
  AbadieResult res = abadie_check(lp.problem, lp.candidate, o.dirs, o.sched, o.seed);

  json rows = json::array();
  for (const AbadieDirection& d : res.per_direction)
    rows.push_back(json{{"direction", vec_json(d.direction)},
                        {"in_tangent_cone", d.in_tangent},
                        {"in_linearized_cone", d.in_linearized}});
  json mismatches = json::array();
  for (const Vec& u : res.mismatches) mismatches.push_back(vec_json(u));

  json results{{"per_direction", std::move(rows)}, {"mismatches", std::move(mismatches)}};
  return Report{make_report("check-abadie", common_config(o), file_digest_hex(o.problem_path),
                            std::move(results), res.pass, {}),
                res.pass};
}

int emit(const Report& report, const std::string& out_path) {
  std::string text = report.body.dump(2);
  if (out_path.empty())
    std::cout << text << "\n";
  else
    write_text_file(out_path, text + "\n");
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimality probes for nonsmooth constrained problems"};
  app.require_subcommand(1);

  CommonOpts o;

  // penalty-path
  double gamma_max = 3.0, gamma_step = 0.25, grid_step = 1e-3, match_tol = 1e-2;
  CLI::App* penalty_path = app.add_subcommand(
      "penalty-path", "sweep the penalty weight and locate the exactness threshold");
  add_common(penalty_path, o);
  penalty_path->add_option("--gamma-max", gamma_max)->check(CLI::NonNegativeNumber);
  penalty_path->add_option("--gamma-step", gamma_step)->check(CLI::PositiveNumber);
  penalty_path->add_option("--grid-step", grid_step)->check(CLI::PositiveNumber);
  penalty_path->add_option("--match-tol", match_tol)->check(CLI::PositiveNumber);

  // check-cq
  double a = 0.0;
  int cq_points = 32;
  CLI::App* check_cq_cmd =
      app.add_subcommand("check-cq", "test the margin condition d(x) <= -a off S");
  add_common(check_cq_cmd, o);
  check_cq_cmd->add_option("--a", a, "required uniform margin")
      ->required()
      ->check(CLI::PositiveNumber);
  check_cq_cmd->add_option("--points", cq_points, "off-S sample points")
      ->check(CLI::PositiveNumber);

  // certify-fj
  std::optional<double> gamma_flag;
  CLI::App* certify_fj =
      app.add_subcommand("certify-fj", "per-direction first-order certificates");
  add_common(certify_fj, o);
  certify_fj->add_option("--gamma", gamma_flag, "penalty weight for the certificate function")
      ->check(CLI::NonNegativeNumber);
  certify_fj->add_option("--gamma-max", gamma_max)->check(CLI::NonNegativeNumber);
  certify_fj->add_option("--gamma-step", gamma_step)->check(CLI::PositiveNumber);
  certify_fj->add_option("--grid-step", grid_step)->check(CLI::PositiveNumber);
  certify_fj->add_option("--match-tol", match_tol)->check(CLI::PositiveNumber);

  // certify-isolated
  std::optional<double> growth_A;
  long growth_points = 10000;
  CLI::App* certify_isolated =
      app.add_subcommand("certify-isolated", "strict per-direction certificates");
  add_common(certify_isolated, o);
  certify_isolated->add_option("--gamma", gamma_flag)->check(CLI::NonNegativeNumber);
  certify_isolated->add_option("--gamma-max", gamma_max)->check(CLI::NonNegativeNumber);
  certify_isolated->add_option("--gamma-step", gamma_step)->check(CLI::PositiveNumber);
  certify_isolated->add_option("--grid-step", grid_step)->check(CLI::PositiveNumber);
  certify_isolated->add_option("--match-tol", match_tol)->check(CLI::PositiveNumber);
  certify_isolated
      ->add_option("--growth-A", growth_A, "also require linear growth with this constant")
      ->check(CLI::PositiveNumber);
  certify_isolated->add_option("--points", growth_points, "growth-check sample points")
      ->check(CLI::PositiveNumber);

  // check-abadie, derivative, tangent
  CLI::App* check_abadie =
      app.add_subcommand("check-abadie", "compare tangent and linearized cones");
  add_common(check_abadie, o);
  CLI::App* derivative =
      app.add_subcommand("derivative", "directional derivative estimates of the objective");
  add_common(derivative, o);
  CLI::App* tangent =
      app.add_subcommand("tangent", "tangent cone membership of sampled directions");
  add_common(tangent, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    o.sched.seed = o.seed;
    o.sched.validate();
    LoadedProblem lp = load_problem(o.problem_path);

    Report report;
    if (*penalty_path) {
      report = run_penalty_path(o, lp, gamma_max, gamma_step, grid_step, match_tol);
    } else if (*check_cq_cmd) {
      report = run_check_cq(o, lp, a, cq_points);
    } else if (*certify_fj) {
      json config = common_config(o);
      std::vector<std::string> warnings;
      double gamma = resolve_gamma(lp, gamma_flag, gamma_max, gamma_step, grid_step, match_tol,
                                   config, warnings);
      report = run_certify_fj(o, lp, std::move(config), gamma, std::move(warnings));
    } else if (*certify_isolated) {
      json config = common_config(o);
      std::vector<std::string> warnings;
      double gamma = resolve_gamma(lp, gamma_flag, gamma_max, gamma_step, grid_step, match_tol,
                                   config, warnings);
      if (growth_A) {
        config["growth_A"] = *growth_A;
        config["points"] = growth_points;
        config["grid_step"] = grid_step;
      }
      report = run_certify_isolated(o, lp, std::move(config), gamma, growth_A, growth_points,
                                    grid_step, std::move(warnings));
    } else if (*check_abadie) {
      report = run_check_abadie(o, lp);
    } else if (*derivative) {
      report = run_derivative(o, lp);
    } else {
      report = run_tangent(o, lp);
    }
    return emit(report, o.out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
