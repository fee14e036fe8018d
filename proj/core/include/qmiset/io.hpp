#pragma once

#include <iosfwd>
#include <string>

#ifdef QMISET_SYSTEM_JSON
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include "qmiset/matrix.hpp"

// Matrix (de)serialization. JSON uses row-major arrays-of-arrays; CSV writes
// one matrix row per line with shortest round-trip decimal formatting, so a
// write/read cycle is bit exact.

namespace qmiset {

using Json = nlohmann::json;

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

void write_matrix_csv(const Matrix& m, std::ostream& os);
Matrix read_matrix_csv(std::istream& is);

void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

}  // namespace qmiset
