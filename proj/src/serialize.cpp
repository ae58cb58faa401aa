#include "ergolab/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ergolab {

nlohmann::json automorphism_to_json(const CellAutomorphism& t) {
  return nlohmann::json{{"n", t.space_size()}, {"forward", t.forward()}};
}

CellAutomorphism automorphism_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("forward"))
    throw ValidationError("automorphism document needs fields n and forward");
  const std::uint64_t n = j.at("n").get<std::uint64_t>();
  check_cell_cap(n, "automorphism_from_json");
  std::vector<std::uint32_t> forward = j.at("forward").get<std::vector<std::uint32_t>>();
  if (forward.size() != n) throw ValidationError("forward array length differs from n");
  return CellAutomorphism(std::move(forward));
}

nlohmann::json skew_to_json(const SkewSystem& s) {
  nlohmann::json fibers = nlohmann::json::array();
  for (const auto& f : s.fibers()) fibers.push_back(f.forward());
  return nlohmann::json{{"base", automorphism_to_json(s.base())}, {"fibers", std::move(fibers)}};
}

SkewSystem skew_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("base") || !j.contains("fibers"))
    throw ValidationError("skew document needs fields base and fibers");
  CellAutomorphism base = automorphism_from_json(j.at("base"));
  std::vector<CellAutomorphism> fibers;
  for (const auto& arr : j.at("fibers"))
    fibers.emplace_back(arr.get<std::vector<std::uint32_t>>());
  return SkewSystem(std::move(base), std::move(fibers));
}

void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << j.dump(2) << "\n";
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << body;
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace ergolab
