#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ergolab/cellsys.hpp"

namespace ergolab {

// Document formats:
//   CellAutomorphism  {"n": 8, "forward": [1, 2, ..., 0]}
//   SkewSystem        {"base": {"n": ..., "forward": [...]},
//                      "fibers": [[...], [...], ...]}
// Arrays are 0-indexed forward maps.

nlohmann::json automorphism_to_json(const CellAutomorphism& t);
CellAutomorphism automorphism_from_json(const nlohmann::json& j);

nlohmann::json skew_to_json(const SkewSystem& s);
SkewSystem skew_from_json(const nlohmann::json& j);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

// Shortest exact decimal round-trip formatting for CSV bodies; output is a
// pure function of the value so reruns are byte-identical.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& body);
std::string read_text_file(const std::string& path);

}  // namespace ergolab
