// qflag: command-line front end for quiver flag varieties and zero loci.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qflag/qflag.hpp"

namespace {

using qflag::Json;

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

// Accepts a bare quiver or {"quiver": ..., "bundle": ...}.
struct PairInput {
  qflag::RawQuiver raw;
  std::vector<qflag::BundleSummand> summands;
};

PairInput read_pair(const std::string& path) {
  const Json j = qflag::read_json(path);
  PairInput in;
  if (j.contains("quiver")) {
    in.raw = qflag::quiver_from_json(j.at("quiver"));
    if (j.contains("bundle")) in.summands = qflag::summands_from_json(j.at("bundle"));
  } else {
    in.raw = qflag::quiver_from_json(j);
  }
  return in;
}

// Raw vertex label for each divisor coordinate.
Json coordinate_labels(const std::vector<int>& relabel) {
  Json a = Json::array();
  for (std::size_t i = 1; i < relabel.size(); ++i) a.push_back(relabel[i]);
  return a;
}

int cmd_validate(const std::string& input) {
  const auto v = qflag::validate(read_pair(input).raw);
  Json j = {{"valid", true},
            {"dimension", v.dimension},
            {"picard_rank", v.picard_rank},
            {"order", v.relabel},
            {"coordinates", coordinate_labels(v.relabel)},
            {"incoming_ranks", v.incoming_ranks},
            {"outgoing_ranks", v.outgoing_ranks},
            {"path_counts", v.path_counts},
            {"anticanonical", v.anticanonical},
            {"fano", qflag::is_fano(v.quiver)}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_normal_form(const std::string& input) {
  const auto in = read_pair(input);
  const auto lq = qflag::load_quiver(in.raw);
  Json j;
  if (in.summands.empty()) {
    const auto nf = qflag::normal_form(lq.quiver);
    j = qflag::quiver_json(nf.presentation);
  } else {
    const auto [q, e] = qflag::load_pair(in.raw, in.summands);
    const auto nf = qflag::bundle_normal_form(q, e);
    j = {{"quiver", qflag::quiver_json(nf.quiver)}, {"bundle", qflag::summands_json(nf.summands)}};
  }
  std::cout << j.dump() << "\n";
  return kOk;
}

int cmd_nef(const std::string& input) {
  const auto lq = qflag::load_quiver(read_pair(input).raw);
  const auto cone = qflag::nef_cone(lq.quiver);
  const auto rays = qflag::cone_rays(cone);
  const auto k = qflag::anticanonical(lq.quiver);
  Json j = {{"coordinates", coordinate_labels(lq.relabel)},
            {"inequalities", cone.inequalities},
            {"rays", rays.rays},
            {"anticanonical", k},
            {"fano", qflag::is_ample(lq.quiver, k)}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_invariants(const std::string& input, std::optional<int> target) {
  const auto in = read_pair(input);
  const auto [q, e] = qflag::load_pair(in.raw, in.summands);
  const auto inv = qflag::zero_locus_invariants(q, e, target);
  Json j = {{"dimension", inv.dimension},
            {"degree", qflag::rational_json(inv.degree)},
            {"euler", qflag::rational_json(inv.euler)},
            {"chi_O", qflag::rational_json(inv.chi_O)},
            {"hilbert", qflag::rationals_json(inv.hilbert)}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_period(const std::string& input, int order, bool cross_check, bool raw_only) {
  const auto in = read_pair(input);
  const auto [q, e] = qflag::load_pair(in.raw, in.summands);
  const qflag::PeriodContext ctx(q, e);
  const auto c = ctx.raw_period(order, ctx.default_specialization(0));
  if (cross_check && c != ctx.raw_period(order, ctx.default_specialization(1))) {
    throw qflag::Error(qflag::ErrorCode::SpecializationMismatch, "period depends on the specialization vector");
  }
  Json j = {{"order", order}, {"coefficients", qflag::rationals_json(c)}};
  if (!raw_only) j["alpha"] = qflag::rationals_json(qflag::regularize(c).alpha);
  std::cout << j.dump() << "\n";
  return kOk;
}

int cmd_classify(int max_dim, bool all, const std::string& out) {
  if (max_dim < 1) throw UsageError("--max-dim must be at least 1");
  std::vector<qflag::ClassificationRecord> records;
  if (all) {
    for (const auto& [raw, q] : qflag::enumerate_quivers(max_dim)) records.push_back(qflag::make_record(q));
    records = qflag::assign_ids(std::move(records));
  } else {
    records = qflag::classify_fano(max_dim);
  }
  emit(out, qflag::to_jsonl(records));
  for (const auto& [d, row] : qflag::count_by_dimension(records)) {
    std::cerr << "dim " << d << ":";
    for (const auto& [rho, n] : row) std::cerr << " " << n;
    std::cerr << "\n";
  }
  return kOk;
}

int cmd_search(const std::string& db, std::optional<int> id, const std::string& quiver, int target, int order,
               bool cross_check, const std::string& out) {
  if (db.empty() == quiver.empty()) throw UsageError("give exactly one of --db or --quiver");
  qflag::RawQuiver raw;
  int quiver_id = 0;
  if (!db.empty()) {
    if (!id) throw UsageError("--db needs --quiver-id");
    bool found = false;
    for (const auto& j : qflag::read_jsonl(db)) {
      const auto rec = qflag::classification_from_json(j);
      if (rec.id == *id) {
        raw = rec.quiver;
        found = true;
        break;
      }
    }
    if (!found) throw qflag::Error(qflag::ErrorCode::InvalidInput, "no quiver with id " + std::to_string(*id));
    quiver_id = *id;
  } else {
    raw = read_pair(quiver).raw;
  }
  const auto lq = qflag::load_quiver(raw);
  std::vector<qflag::ZeroLocusRecord> records;
  for (const auto& e : qflag::search_bundles(lq.quiver, target)) {
    if (qflag::is_known_empty(lq.quiver, e)) continue;
    records.push_back(qflag::compute_zero_locus(quiver_id, qflag::bundle_normal_form(lq.quiver, e), order, target, cross_check));
  }
  emit(out, qflag::to_jsonl(records));
  return kOk;
}

std::vector<qflag::ZeroLocusRecord> read_db(const std::string& db) {
  std::vector<qflag::ZeroLocusRecord> records;
  std::size_t n = 0;
  for (const auto& j : qflag::read_jsonl(db)) {
    ++n;
    try {
      records.push_back(qflag::zero_locus_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw qflag::Error(qflag::ErrorCode::InvalidInput, db + " record " + std::to_string(n) + ": " + e.what());
    }
  }
  return records;
}

int cmd_export(const std::string& db, const std::string& format, const std::string& out) {
  const auto rows = qflag::export_rows(qflag::screen_and_bucket(read_db(db)));
  emit(out, format == "md" ? qflag::export_markdown(rows) : qflag::export_csv(rows));
  return kOk;
}

int cmd_query(const std::string& db, const std::string& filter, const std::string& out) {
  std::string text;
  for (const auto& r : qflag::query(read_db(db), filter)) text += qflag::record_json(r).dump() + "\n";
  emit(out, text);
  return kOk;
}

int cmd_pipeline(qflag::PipelineConfig config) {
  const auto result = qflag::run_pipeline(config);
  std::size_t collisions = 0;
  for (const auto& b : result.screen.buckets) collisions += b.collision;
  Json j = {{"out_dir", config.out_dir},
            {"varieties", result.varieties.size()},
            {"zero_loci", result.zero_loci.size()},
            {"discarded", result.screen.discarded},
            {"buckets", result.screen.buckets.size()},
            {"collisions", collisions},
            {"resumed", result.resumed}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qflag: quiver flag varieties, zero loci and quantum periods"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qflag::kToolVersion);

  std::string input = "-";
  auto* validate = app.add_subcommand("validate", "check a quiver and print its basic data");
  validate->add_option("input", input, "quiver JSON file, or - for stdin");

  auto* nf = app.add_subcommand("normal-form", "normal form of a quiver or a (quiver, bundle) pair");
  nf->add_option("input", input, "JSON file, or - for stdin");

  auto* nef = app.add_subcommand("nef", "nef cone inequalities and rays");
  nef->add_option("input", input, "quiver JSON file, or - for stdin");

  std::optional<int> target_opt;
  auto* inv = app.add_subcommand("invariants", "degree, Euler number, chi(O) and Hilbert values of a zero locus");
  inv->add_option("input", input, "pair JSON file, or - for stdin");
  inv->add_option("--dim", target_opt, "expected dimension of the zero locus");

  int order = 8;
  bool no_cross_check = false, raw_only = false;
  auto* period = app.add_subcommand("period", "regularized quantum period sequence");
  period->add_option("input", input, "pair JSON file, or - for stdin");
  period->add_option("--order", order, "highest coefficient")->check(CLI::Range(0, 64));
  period->add_flag("--no-cross-check", no_cross_check, "skip the second specialization vector");
  period->add_flag("--raw", raw_only, "print only the unregularized coefficients");

  int max_dim = 4;
  bool all = false;
  std::string out = "-";
  auto* classify = app.add_subcommand("classify", "enumerate Fano quiver flag varieties up to a dimension");
  classify->add_option("--max-dim", max_dim, "largest dimension")->required();
  classify->add_option("--out", out, "JSONL output, - for stdout");
  classify->add_flag("--all", all, "keep non-Fano varieties too");

  std::string db, quiver_file;
  std::optional<int> quiver_id;
  int target = 4;
  auto* search = app.add_subcommand("search", "bundle search and invariants on one quiver");
  search->add_option("--db", db, "classification JSONL");
  search->add_option("--quiver-id", quiver_id, "record id in --db");
  search->add_option("--quiver", quiver_file, "quiver JSON file instead of --db");
  search->add_option("--target-dim", target, "dimension of the zero loci")->check(CLI::NonNegativeNumber);
  search->add_option("--order", order, "period order")->check(CLI::Range(0, 64));
  search->add_flag("--no-cross-check", no_cross_check, "skip the second specialization vector");
  search->add_option("--out", out, "JSONL output, - for stdout");

  std::string format = "csv";
  auto* exp = app.add_subcommand("export", "bucketed period table");
  exp->add_option("--db", db, "zero-locus JSONL")->required();
  exp->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  exp->add_option("--out", out, "output file, - for stdout");

  std::string filter;
  auto* qry = app.add_subcommand("query", "filter zero-locus records");
  qry->add_option("--db", db, "zero-locus JSONL")->required();
  qry->add_option("--filter", filter, "comma-separated clauses, e.g. degree>=500,alpha=1:0:0")->required();
  qry->add_option("--out", out, "JSONL output, - for stdout");

  qflag::PipelineConfig config;
  auto* pipe = app.add_subcommand("pipeline", "classify, search, invariants, periods and buckets");
  pipe->add_option("--max-dim", config.max_dim, "largest ambient dimension");
  pipe->add_option("--order", config.order, "period order")->check(CLI::Range(1, 64));
  pipe->add_option("--target-dim", config.target_dim, "dimension of the zero loci");
  pipe->add_option("--out-dir", config.out_dir, "artifact directory");
  pipe->add_flag("--no-cross-check", no_cross_check, "skip the second specialization vector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(input);
    if (*nf) return cmd_normal_form(input);
    if (*nef) return cmd_nef(input);
    if (*inv) return cmd_invariants(input, target_opt);
    if (*period) return cmd_period(input, order, !no_cross_check, raw_only);
    if (*classify) return cmd_classify(max_dim, all, out);
    if (*search) return cmd_search(db, quiver_id, quiver_file, target, order, !no_cross_check, out);
    if (*exp) return cmd_export(db, format, out);
    if (*qry) return cmd_query(db, filter, out);
    if (*pipe) {
      config.cross_check = !no_cross_check;
      return cmd_pipeline(config);
    }
  } catch (const qflag::Error& e) {
    std::cerr << "error [" << qflag::to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == qflag::ErrorCode::MalformedFilter ? kUsage : kDomain;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [InvalidInput]: " << e.what() << "\n";
    return kDomain;
  } catch (const std::runtime_error& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
