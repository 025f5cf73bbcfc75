#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pencert/certify.hpp"
#include "pencert/extended_real.hpp"
#include "pencert/hadamard.hpp"
#include "pencert/penalty.hpp"
#include "pencert/types.hpp"

namespace pencert {

using json = nlohmann::json;

/// Finite values serialize as numbers, infinities as "-inf"/"+inf".
json ext_json(ExtReal v);

json vec_json(const Vec& v);
json schedule_json(const SamplingSchedule& sched);
json estimate_json(const DerivativeEstimate& est);
json derivative_vector_json(const DerivativeVector& dv);
json certificate_json(const Certificate& cert);
json cq_report_json(const CqReport& report);
json penalty_path_json(const PenaltyPathResult& result);

/// FNV-1a 64-bit digest of the file contents, as 16 hex digits.
std::string file_digest_hex(const std::filesystem::path& path);

/// UTC timestamp, ISO 8601.
std::string utc_timestamp();

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace pencert
