#pragma once

#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qflag/cohomology.hpp"
#include "qflag/error.hpp"
#include "qflag/io.hpp"
#include "qflag/period.hpp"
#include "qflag/search.hpp"

namespace qflag {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kWorkersEnv = "QFLAG_WORKERS";

/// Worker count from QFLAG_WORKERS; 1 when unset or malformed.
inline int worker_count() {
  const char* v = std::getenv(kWorkersEnv);
  if (!v) return 1;
  try {
    const int n = std::stoi(v);
    return n > 0 ? n : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

/// Runs fn(0..n-1) on a pool; the first exception is rethrown after join.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

inline std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(read_text(p.string())); }

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Writes through a temporary file and renames, so readers never see a
/// half-written artifact.
inline void write_atomically(const std::filesystem::path& p, const std::string& text) {
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, p);
}

template <class Records>
std::string to_jsonl(const Records& records) {
  std::string text;
  for (const auto& r : records) text += record_json(r).dump() + "\n";
  return text;
}

struct PipelineConfig {
  int max_dim = 4;
  int order = 8;
  int target_dim = 4;
  bool cross_check = true;
  std::string out_dir = "qflag-out";
};

struct PipelineResult {
  std::vector<ClassificationRecord> varieties;
  std::vector<ZeroLocusRecord> zero_loci;
  ScreenResult screen;
  std::vector<std::string> resumed;  // stages skipped thanks to the manifest
};

inline Json config_json(const PipelineConfig& c) {
  return {{"max_dim", c.max_dim}, {"order", c.order}, {"target_dim", c.target_dim}, {"cross_check", c.cross_check}};
}

inline void check_config(const PipelineConfig& c) {
  if (c.max_dim < 1) throw Error(ErrorCode::InvalidInput, "max_dim must be at least 1");
  if (c.order < 1) throw Error(ErrorCode::InvalidInput, "order must be at least 1");
  if (c.target_dim < 0) throw Error(ErrorCode::InvalidInput, "target_dim must be non-negative");
  if (c.out_dir.empty()) throw Error(ErrorCode::InvalidInput, "output path is empty");
}

/// A candidate pair awaiting invariants.
struct Candidate {
  int quiver_id = 0;
  BundleNormalForm model;
};

inline Json candidate_json(const Candidate& c) {
  return {{"quiver_id", c.quiver_id}, {"quiver", quiver_json(c.model.quiver)}, {"bundle", summands_json(c.model.summands)}};
}

inline Candidate candidate_from_json(const Json& j) {
  return {j.at("quiver_id").get<int>(), {quiver_from_json(j.at("quiver")), summands_from_json(j.at("bundle"))}};
}

/// Loads a presentation-ordered pair into internal order.
inline std::pair<Quiver, BundleSpec> load_pair(const RawQuiver& raw, const std::vector<BundleSummand>& summands) {
  const LabeledQuiver lq = load_quiver(raw);
  BundleSpec e = bundle_to_internal(summands, lq.relabel);
  check_bundle(e, lq.quiver);
  return {lq.quiver, std::move(e)};
}

inline ZeroLocusRecord compute_zero_locus(int quiver_id, const BundleNormalForm& model, int order,
                                          std::optional<int> target_dim, bool cross_check) {
  const auto [q, e] = load_pair(model.quiver, model.summands);
  const auto inv = zero_locus_invariants(q, e, target_dim);
  const PeriodContext ctx(q, e);
  const auto raw = ctx.raw_period(order, ctx.default_specialization(0));
  if (cross_check && raw != ctx.raw_period(order, ctx.default_specialization(1))) {
    throw Error(ErrorCode::SpecializationMismatch, "period depends on the specialization vector");
  }
  ZeroLocusRecord r;
  r.quiver_id = quiver_id;
  r.model = model;
  r.dimension = inv.dimension;
  r.ambient_dimension = q.dimension();
  r.picard_rank = q.picard_rank();
  r.degree = inv.degree;
  r.euler = inv.euler;
  r.chi_O = inv.chi_O;
  r.hilbert = inv.hilbert;
  r.period = regularize(raw).alpha;
  return r;
}

namespace detail {

struct StageFiles {
  const char* name;
  const char* output;
  const char* input;  // nullptr for the first stage
};

inline constexpr StageFiles kStages[] = {
    {"classify", "varieties.jsonl", nullptr},
    {"search", "candidates.jsonl", "varieties.jsonl"},
    {"invariants", "zero_loci.jsonl", "candidates.jsonl"},
    {"buckets", "buckets.jsonl", "zero_loci.jsonl"},
};

}  // namespace detail

/// classify -> search -> invariants and periods -> buckets, each stage
/// written as JSONL next to manifest.json. A stage is skipped when the
/// manifest records the same parameters, the same input hash and an
/// output file whose hash still matches.
inline PipelineResult run_pipeline(const PipelineConfig& config, int workers = worker_count()) {
  check_config(config);
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  const fs::path manifest_path = dir / "manifest.json";

  Json manifest;
  if (fs::exists(manifest_path)) {
    try {
      manifest = Json::parse(read_text(manifest_path.string()));
    } catch (const std::exception&) {
      manifest = Json();
    }
  }
  if (!manifest.is_object() || manifest.value("parameters", Json()) != config_json(config) ||
      manifest.value("version", std::string()) != kToolVersion) {
    manifest = {{"tool", "qflag"},
                {"version", kToolVersion},
                {"parameters", config_json(config)},
                {"started", utc_timestamp()},
                {"stages", Json::object()}};
  }
  auto save_manifest = [&] { write_atomically(manifest_path, manifest.dump(2) + "\n"); };

  PipelineResult result;
  auto stage_done = [&](const detail::StageFiles& s) {
    const Json& st = manifest["stages"].contains(s.name) ? manifest["stages"][s.name] : Json();
    if (!st.is_object()) return false;
    const fs::path out = dir / s.output;
    if (!fs::exists(out) || st.value("sha256", std::string()) != sha256_file(out)) return false;
    if (s.input && st.value("input_sha256", std::string()) != sha256_file(dir / s.input)) return false;
    result.resumed.push_back(s.name);
    return true;
  };
  auto finish_stage = [&](const detail::StageFiles& s, const std::string& text, std::size_t records) {
    const fs::path out = dir / s.output;
    write_atomically(out, text);
    Json st = {{"output", s.output}, {"sha256", sha256_hex(text)}, {"records", records}, {"completed", utc_timestamp()}};
    if (s.input) st["input_sha256"] = sha256_file(dir / s.input);
    manifest["stages"][s.name] = st;
    save_manifest();
  };

  // classify
  const auto& s0 = detail::kStages[0];
  if (stage_done(s0)) {
    for (const auto& j : read_jsonl((dir / s0.output).string())) result.varieties.push_back(classification_from_json(j));
  } else {
    result.varieties = classify_fano(config.max_dim);
    finish_stage(s0, to_jsonl(result.varieties), result.varieties.size());
  }

  // search
  const auto& s1 = detail::kStages[1];
  std::vector<Candidate> candidates;
  if (stage_done(s1)) {
    for (const auto& j : read_jsonl((dir / s1.output).string())) candidates.push_back(candidate_from_json(j));
  } else {
    std::vector<std::vector<Candidate>> per(result.varieties.size());
    parallel_for(result.varieties.size(), workers, [&](std::size_t k) {
      const auto& rec = result.varieties[k];
      if (rec.dimension < config.target_dim) return;
      try {
        const LabeledQuiver lq = load_quiver(rec.quiver);
        for (const auto& e : search_bundles(lq.quiver, config.target_dim)) {
          if (is_known_empty(lq.quiver, e)) continue;
          per[k].push_back({rec.id, bundle_normal_form(lq.quiver, e)});
        }
      } catch (const Error& err) {
        throw Error(err.code(), "search, quiver " + std::to_string(rec.id) + ": " + err.what());
      }
    });
    for (auto& v : per) candidates.insert(candidates.end(), v.begin(), v.end());
    std::string text;
    for (const auto& c : candidates) text += candidate_json(c).dump() + "\n";
    finish_stage(s1, text, candidates.size());
  }

  // invariants and periods
  const auto& s2 = detail::kStages[2];
  if (stage_done(s2)) {
    for (const auto& j : read_jsonl((dir / s2.output).string())) result.zero_loci.push_back(zero_locus_from_json(j));
  } else {
    result.zero_loci.resize(candidates.size());
    parallel_for(candidates.size(), workers, [&](std::size_t k) {
      const auto& c = candidates[k];
      try {
        result.zero_loci[k] = compute_zero_locus(c.quiver_id, c.model, config.order, config.target_dim, config.cross_check);
      } catch (const Error& err) {
        throw Error(err.code(), "invariants, quiver " + std::to_string(c.quiver_id) + " bundle " +
                                    summands_json(c.model.summands).dump() + ": " + err.what());
      }
    });
    finish_stage(s2, to_jsonl(result.zero_loci), result.zero_loci.size());
  }

  // buckets
  const auto& s3 = detail::kStages[3];
  result.screen = screen_and_bucket(result.zero_loci);
  if (!stage_done(s3)) {
    std::string text;
    for (const auto& b : result.screen.buckets) text += bucket_json(b, result.screen.kept).dump() + "\n";
    finish_stage(s3, text, result.screen.buckets.size());
  }
  manifest["finished"] = utc_timestamp();
  save_manifest();
  return result;
}

/// One Table-4-shaped row: a bucket with its representative model.
struct ExportRow {
  int bucket = 0;
  std::vector<Rational> alpha;
  std::string quiver;
  std::string dim_vector;
  std::string bundle;
  Rational degree;
  Rational euler;

  friend bool operator==(const ExportRow&, const ExportRow&) = default;
};

inline constexpr int kExportTerms = 8;

inline std::vector<ExportRow> export_rows(const ScreenResult& screen) {
  std::vector<ExportRow> rows;
  for (const auto& b : screen.buckets) {
    const auto& rep = screen.kept[b.members.front()];
    ExportRow row;
    row.bucket = b.id;
    for (int k = 0; k < kExportTerms && k < static_cast<int>(b.key.size()); ++k) row.alpha.push_back(b.key[k]);
    row.quiver = Json(rep.model.quiver.adjacency).dump();
    row.dim_vector = Json(rep.model.quiver.dim_vector).dump();
    row.bundle = summands_json(rep.model.summands)["summands"].dump();
    row.degree = rep.degree;
    row.euler = rep.euler;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::string> export_header() {
  std::vector<std::string> h{"bucket"};
  for (int k = 0; k < kExportTerms; ++k) h.push_back("alpha_" + std::to_string(k));
  for (const char* c : {"quiver", "dim_vector", "bundle", "degree", "euler"}) h.emplace_back(c);
  return h;
}

inline std::vector<std::string> row_fields(const ExportRow& r) {
  std::vector<std::string> f{std::to_string(r.bucket)};
  for (int k = 0; k < kExportTerms; ++k) f.push_back(k < static_cast<int>(r.alpha.size()) ? to_string(r.alpha[k]) : "");
  for (const auto& s : {r.quiver, r.dim_vector, r.bundle, to_string(r.degree), to_string(r.euler)}) f.push_back(s);
  return f;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string export_csv(const std::vector<ExportRow>& rows) {
  auto line = [](const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + csv_field(fields[i]);
    return s + "\n";
  };
  std::string text = line(export_header());
  for (const auto& r : rows) text += line(row_fields(r));
  return text;
}

inline std::string export_markdown(const std::vector<ExportRow>& rows) {
  auto line = [](const std::vector<std::string>& fields) {
    std::string s = "|";
    for (const auto& f : fields) {
      std::string cell;
      for (char c : f) cell += c == '|' ? std::string("\\|") : std::string(1, c);
      s += " " + cell + " |";
    }
    return s + "\n";
  };
  const auto header = export_header();
  std::string text = line(header) + "|";
  for (std::size_t i = 0; i < header.size(); ++i) text += "---|";
  text += "\n";
  for (const auto& r : rows) text += line(row_fields(r));
  return text;
}

/// Splits CSV text into records of fields, honouring quotes.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      rec.push_back(std::move(field));
      field.clear();
      out.push_back(std::move(rec));
      rec.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::InvalidInput, "unterminated quoted CSV field");
  if (any) {
    rec.push_back(std::move(field));
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<ExportRow> import_csv(const std::string& text) {
  const auto records = parse_csv(text);
  if (records.empty() || records.front() != export_header()) throw Error(ErrorCode::InvalidInput, "unexpected CSV header");
  std::vector<ExportRow> rows;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& f = records[k];
    if (f.size() != export_header().size()) throw Error(ErrorCode::InvalidInput, "CSV row " + std::to_string(k) + " has wrong width");
    ExportRow r;
    r.bucket = std::stoi(f[0]);
    for (int j = 0; j < kExportTerms; ++j) {
      if (!f[1 + j].empty()) r.alpha.push_back(parse_rational(f[1 + j]));
    }
    r.quiver = f[kExportTerms + 1];
    r.dim_vector = f[kExportTerms + 2];
    r.bundle = f[kExportTerms + 3];
    r.degree = parse_rational(f[kExportTerms + 4]);
    r.euler = parse_rational(f[kExportTerms + 5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// One "key op value" clause of a query filter.
struct FilterClause {
  std::string key;
  std::string op;
  std::string value;
};

inline std::vector<FilterClause> parse_filter(const std::string& filter) {
  std::vector<FilterClause> clauses;
  std::stringstream ss(filter);
  std::string part;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto pos = part.find_first_of("<>=");
    if (pos == std::string::npos || pos == 0) throw Error(ErrorCode::MalformedFilter, "clause '" + part + "' has no operator");
    std::string op = part.substr(pos, part[pos] != '=' && pos + 1 < part.size() && part[pos + 1] == '=' ? 2 : 1);
    FilterClause c{trim(part.substr(0, pos)), op, trim(part.substr(pos + op.size()))};
    if (c.op != "=" && c.op != "<=" && c.op != ">=") throw Error(ErrorCode::MalformedFilter, "unsupported operator '" + c.op + "'");
    if (c.value.empty()) throw Error(ErrorCode::MalformedFilter, "clause '" + part + "' has no value");
    static const std::vector<std::string> keys{"dimension", "ambient", "ambient_dimension", "rank", "degree", "euler", "alpha"};
    if (std::find(keys.begin(), keys.end(), c.key) == keys.end()) {
      throw Error(ErrorCode::MalformedFilter, "unknown key '" + c.key + "'");
    }
    if (c.key == "alpha" && c.op != "=") throw Error(ErrorCode::MalformedFilter, "alpha takes a prefix with '='");
    try {
      if (c.key == "alpha") {
        std::stringstream as(c.value);
        std::string t;
        while (std::getline(as, t, ':')) parse_rational(trim(t));
      } else {
        parse_rational(c.value);
      }
    } catch (const Error&) {
      throw Error(ErrorCode::MalformedFilter, "bad value in clause '" + part + "'");
    }
    clauses.push_back(std::move(c));
  }
  return clauses;
}

inline bool matches(const ZeroLocusRecord& r, const std::vector<FilterClause>& clauses) {
  for (const auto& c : clauses) {
    if (c.key == "alpha") {
      std::stringstream as(c.value);
      std::string t;
      std::size_t k = 0;
      while (std::getline(as, t, ':')) {
        if (k >= r.period.size() || r.period[k] != parse_rational(t)) return false;
        ++k;
      }
      continue;
    }
    Rational lhs;
    if (c.key == "dimension") lhs = r.dimension;
    else if (c.key == "ambient" || c.key == "ambient_dimension") lhs = r.ambient_dimension;
    else if (c.key == "rank") lhs = r.picard_rank;
    else if (c.key == "degree") lhs = r.degree;
    else lhs = r.euler;
    const Rational rhs = parse_rational(c.value);
    if ((c.op == "=" && lhs != rhs) || (c.op == "<=" && lhs > rhs) || (c.op == ">=" && lhs < rhs)) return false;
  }
  return true;
}

/// Records matching every clause, ordered by quiver id.
inline std::vector<ZeroLocusRecord> query(const std::vector<ZeroLocusRecord>& records, const std::string& filter) {
  const auto clauses = parse_filter(filter);
  std::vector<ZeroLocusRecord> out;
  for (const auto& r : records) {
    if (matches(r, clauses)) out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ZeroLocusRecord& a, const ZeroLocusRecord& b) { return a.quiver_id < b.quiver_id; });
  return out;
}

}  // namespace qflag
