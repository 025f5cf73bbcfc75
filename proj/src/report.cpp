#include "pencert/report.hpp"

#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pencert/errors.hpp"

namespace pencert {

json ext_json(ExtReal v) {
  if (v.is_finite()) return v.finite_value();
  return to_string(v);
}

json vec_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json schedule_json(const SamplingSchedule& sched) {
  return json{{"t0", sched.t0},
              {"ratio", sched.ratio},
              {"levels", sched.levels},
              {"samples_per_level", sched.samples_per_level},
              {"dir_radius_factor", sched.dir_radius_factor},
              {"seed", sched.seed}};
}

json estimate_json(const DerivativeEstimate& est) {
  json levels = json::array();
  for (const LevelStat& s : est.level_minima) {
    json level{{"scale", s.scale}, {"admissible", s.admissible}};
    if (s.admissible > 0) {
      level["min_quotient"] = s.min_quotient;
      level["max_quotient"] = s.max_quotient;
    }
    levels.push_back(std::move(level));
  }
  return json{{"value", ext_json(est.value)},
              {"admissible_samples", est.admissible_samples},
              {"levels", std::move(levels)}};
}

json derivative_vector_json(const DerivativeVector& dv) {
  json alpha = json::array();
  for (ExtReal v : dv.alpha) alpha.push_back(ext_json(v));
  return json{{"direction", vec_json(dv.direction)},
              {"alpha0", ext_json(dv.alpha0)},
              {"alpha", std::move(alpha)},
              {"gamma_used", dv.gamma_used}};
}

json certificate_json(const Certificate& cert) {
  return json{{"lambda", cert.lambda},
              {"kind", cert.kind == CertificateKind::Strict ? "strict" : "nonstrict"},
              {"direction", vec_json(cert.direction)},
              {"pairing_value", ext_json(cert.pairing_value)}};
}

json cq_report_json(const CqReport& report) {
  json points = json::array();
  for (const Vec& x : report.sampled_points) points.push_back(vec_json(x));
  json margins = json::array();
  for (ExtReal m : report.d_hat) margins.push_back(ext_json(m));
  return json{{"sampled_points", std::move(points)},
              {"margins", std::move(margins)},
              {"worst_margin", ext_json(report.worst)},
              {"pass", report.pass}};
}

json penalty_path_json(const PenaltyPathResult& result) {
  json rows = json::array();
  for (std::size_t i = 0; i < result.gamma_values.size(); ++i) {
    const auto& e = result.per_gamma[i];
    rows.push_back(json{{"gamma", result.gamma_values[i]},
                        {"argmin", vec_json(e.argmin)},
                        {"min_value", e.min_value},
                        {"dist_to_xbar", e.dist_to_xbar}});
  }
  json out{{"per_gamma", std::move(rows)}};
  if (result.threshold_s)
    out["threshold_s"] = *result.threshold_s;
  else
    out["threshold_s"] = nullptr;
  return out;
}

std::string file_digest_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for digest: " + path.string());
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path.string());
  out << content;
  if (!out) throw IoError("failed writing output file: " + path.string());
}

}  // namespace pencert
