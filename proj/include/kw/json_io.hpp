#pragma once

#include <string>

#include "json.hpp"

#include "kw/experiments.hpp"
#include "kw/types.hpp"

namespace kw {

// Wire format for matrices: row-major nested arrays of [re, im] pairs.
// Vectors are flat arrays of [re, im] pairs.

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

/// %.17g rendering, enough digits to round-trip a double.
std::string format_g17(double x);

/// Deterministic report serialization. Timings are emitted only when
/// include_timings is set; the on-disk report.json omits them so identical
/// (config, overrides) produce byte-identical files.
nlohmann::json report_to_json(const ExperimentReport& r, bool include_timings);

/// CSV with header "n,p_discrete,op_error,p_closed_form", '.' decimal
/// separator, 17 significant digits.
std::string report_csv(const ExperimentReport& r);

}  // namespace kw
