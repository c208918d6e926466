#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflag/arith.hpp"
#include "qflag/cones.hpp"
#include "qflag/error.hpp"
#include "qflag/quiver.hpp"
#include "qflag/schur.hpp"
#include "qflag/search.hpp"

namespace qflag {

using Json = nlohmann::json;

inline Json rational_json(const Rational& q) { return to_string(q); }

inline Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw Error(ErrorCode::InvalidInput, "expected a rational, got " + j.dump());
}

inline Json rationals_json(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(rational_json(q));
  return a;
}

inline std::vector<Rational> rationals_from_json(const Json& j) {
  std::vector<Rational> v;
  for (const auto& x : j) v.push_back(rational_from_json(x));
  return v;
}

inline Json quiver_json(const RawQuiver& q) { return {{"adjacency", q.adjacency}, {"dim_vector", q.dim_vector}}; }

inline RawQuiver quiver_from_json(const Json& j) {
  try {
    return {j.at("adjacency").get<std::vector<std::vector<int>>>(), j.at("dim_vector").get<std::vector<int>>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("quiver JSON: ") + e.what());
  }
}

inline Json summands_json(const std::vector<BundleSummand>& summands) {
  Json a = Json::array();
  for (const auto& s : summands) a.push_back(s.partitions);
  return {{"summands", a}};
}

inline std::vector<BundleSummand> summands_from_json(const Json& j) {
  try {
    std::vector<BundleSummand> out;
    for (const auto& s : j.at("summands")) out.push_back({s.get<std::vector<Partition>>()});
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bundle JSON: ") + e.what());
  }
}

inline Json cone_json(const ConeH& c) { return {{"inequalities", c.inequalities}}; }
inline Json cone_json(const ConeV& c) { return {{"rays", c.rays}}; }

inline ConeH cone_from_json(const Json& j) {
  ConeH c;
  c.inequalities = j.at("inequalities").get<IntMatrix>();
  c.dim = c.inequalities.empty() ? 0 : static_cast<int>(c.inequalities.front().size());
  return c;
}

inline Json record_json(const ClassificationRecord& r) {
  return {{"id", r.id},
          {"quiver", quiver_json(r.quiver)},
          {"dimension", r.dimension},
          {"picard_rank", r.picard_rank},
          {"anticanonical", r.anticanonical},
          {"nef_rays", r.nef_rays},
          {"fano", r.fano}};
}

inline ClassificationRecord classification_from_json(const Json& j) {
  ClassificationRecord r;
  r.id = j.at("id").get<int>();
  r.quiver = quiver_from_json(j.at("quiver"));
  r.dimension = j.at("dimension").get<int>();
  r.picard_rank = j.at("picard_rank").get<int>();
  r.anticanonical = j.at("anticanonical").get<IntVec>();
  r.nef_rays = j.at("nef_rays").get<IntMatrix>();
  r.fano = j.at("fano").get<bool>();
  return r;
}

inline Json record_json(const ZeroLocusRecord& r) {
  Json j = {{"quiver_id", r.quiver_id},
            {"quiver", quiver_json(r.model.quiver)},
            {"bundle", summands_json(r.model.summands)},
            {"dimension", r.dimension},
            {"ambient_dimension", r.ambient_dimension},
            {"picard_rank", r.picard_rank},
            {"degree", rational_json(r.degree)},
            {"euler", rational_json(r.euler)},
            {"chi_O", rational_json(r.chi_O)},
            {"hilbert", rationals_json(r.hilbert)},
            {"alpha", rationals_json(r.period)}};
  return j;
}

inline ZeroLocusRecord zero_locus_from_json(const Json& j) {
  ZeroLocusRecord r;
  r.quiver_id = j.at("quiver_id").get<int>();
  r.model.quiver = quiver_from_json(j.at("quiver"));
  r.model.summands = summands_from_json(j.at("bundle"));
  r.dimension = j.at("dimension").get<int>();
  r.ambient_dimension = j.at("ambient_dimension").get<int>();
  r.picard_rank = j.at("picard_rank").get<int>();
  r.degree = rational_from_json(j.at("degree"));
  r.euler = rational_from_json(j.at("euler"));
  r.chi_O = rational_from_json(j.at("chi_O"));
  r.hilbert = rationals_from_json(j.at("hilbert"));
  r.period = rationals_from_json(j.at("alpha"));
  return r;
}

inline Json bucket_json(const Bucket& b, const std::vector<ZeroLocusRecord>& kept) {
  Json members = Json::array();
  for (auto m : b.members) members.push_back({{"quiver_id", kept[m].quiver_id}, {"index", m}});
  Json j = {{"bucket", b.id}, {"alpha", rationals_json(b.key)}, {"members", members}, {"collision", b.collision}};
  if (!b.report.empty()) j["report"] = b.report;
  return j;
}

/// Reads a whole file, or standard input for "-".
inline std::string read_text(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

inline std::vector<Json> read_jsonl(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<Json> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::InvalidInput, path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace qflag
