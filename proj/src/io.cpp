#include "sparsegeom/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "json.hpp"

namespace sparsegeom {

namespace {

using ojson = nlohmann::ordered_json;

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

// Parses one CSV field (1-based row/column used in error messages only).
double parse_field(const std::string& field, std::size_t row, std::size_t col) {
  const std::size_t lo = field.find_first_not_of(" \t\r");
  if (lo == std::string::npos)
    fail(ErrorCode::ParseError, "csv row " + std::to_string(row) + ", column " +
                                    std::to_string(col) + ": empty field");
  const std::size_t hi = field.find_last_not_of(" \t\r");
  double value = 0.0;
  const char* first = field.data() + lo;
  const char* last = field.data() + hi + 1;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    fail(ErrorCode::ParseError, "csv row " + std::to_string(row) + ", column " +
                                    std::to_string(col) + ": bad number '" +
                                    field.substr(lo, hi - lo + 1) + "'");
  return value;
}

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ParseError, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::ParseError, "failed writing '" + path + "'");
}

}  // namespace

PointSet parse_pointset_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    ++lineno;
    if (blank(line)) continue;
    std::vector<double> row;
    std::size_t start = 0;
    for (std::size_t col = 1;; ++col) {
      const std::size_t comma = line.find(',', start);
      const std::string field = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      row.push_back(parse_field(field, lineno, col));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::ParseError,
           "csv row " + std::to_string(lineno) + ": expected " +
               std::to_string(rows.front().size()) + " fields, got " +
               std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::ParseError, "csv input has no data rows");
  Matrix pts(static_cast<Eigen::Index>(rows.front().size()),
             static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t r = 0; r < rows[i].size(); ++r)
      pts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
          rows[i][r];
  return PointSet(std::move(pts));
}

PointSet parse_pointset_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError,
         "json parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j.contains("points"))
    fail(ErrorCode::ParseError,
         "json point set needs an object with 'dim' and 'points'");
  if (!j["dim"].is_number_integer() && !j["dim"].is_number_unsigned())
    fail(ErrorCode::ParseError, "json 'dim' must be an integer");
  const std::int64_t dim = j["dim"].get<std::int64_t>();
  if (dim < 1) fail(ErrorCode::ParseError, "json 'dim' must be >= 1");
  if (!j["points"].is_array())
    fail(ErrorCode::ParseError, "json 'points' must be an array of rows");
  const auto& points = j["points"];
  Matrix pts(static_cast<Eigen::Index>(dim),
             static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& row = points[i];
    if (!row.is_array())
      fail(ErrorCode::ParseError,
           "json row " + std::to_string(i + 1) + ": not an array");
    if (row.size() != static_cast<std::size_t>(dim))
      fail(ErrorCode::DimensionMismatch,
           "json row " + std::to_string(i + 1) + " has " +
               std::to_string(row.size()) + " coordinates, expected " +
               std::to_string(dim));
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number())
        fail(ErrorCode::ParseError, "json row " + std::to_string(i + 1) +
                                        ", column " + std::to_string(c + 1) +
                                        ": not a number");
      pts(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
          row[c].get<double>();
    }
  }
  return PointSet(std::move(pts));
}

std::string pointset_to_csv(const PointSet& P) {
  std::string out;
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    for (Eigen::Index r = 0; r < P.dim(); ++r) {
      if (r > 0) out += ',';
      out += shortest(P.data()(r, i));
    }
    out += '\n';
  }
  return out;
}

std::string pointset_to_json(const PointSet& P) {
  ojson j;
  j["dim"] = P.dim();
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index r = 0; r < P.dim(); ++r) row.push_back(P.data()(r, i));
    rows.push_back(std::move(row));
  }
  j["points"] = std::move(rows);
  return j.dump();
}

PointSet load_pointset(const std::string& path) {
  const std::string text = read_file(path);
  const std::size_t lo = text.find_first_not_of(" \t\r\n");
  if (lo != std::string::npos && text[lo] == '{')
    return parse_pointset_json(text);
  return parse_pointset_csv(text);
}

void save_pointset_csv(const PointSet& P, const std::string& path) {
  write_file(path, pointset_to_csv(P));
}

void save_pointset_json(const PointSet& P, const std::string& path) {
  write_file(path, pointset_to_json(P));
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : {Variant::SLR, Variant::ANLF, Variant::AffineSLR,
                    Variant::ANIF, Variant::ConvexSLR, Variant::ANIS,
                    Variant::Segment})
    if (name == variant_name(v)) return v;
  fail(ErrorCode::InvalidArgument, "unknown variant '" + name + "'");
}

AnnBackend backend_from_name(const std::string& name) {
  if (name == "exact") return AnnBackend::Exact;
  if (name == "tree") return AnnBackend::Tree;
  fail(ErrorCode::InvalidArgument, "unknown backend '" + name + "'");
}

const char* backend_name(AnnBackend backend) {
  return backend == AnnBackend::Exact ? "exact" : "tree";
}

void validate_config(const RunConfig& cfg) {
  if (cfg.command != "query" && cfg.command != "oracle-check" &&
      cfg.command != "bench" && cfg.command != "reduce")
    fail(ErrorCode::InvalidArgument, "unknown command '" + cfg.command + "'");
  const bool flat_variant = cfg.variant == "slr" || cfg.variant == "anlf" ||
                            cfg.variant == "anif";
  const bool segment_variant =
      cfg.variant == "segment" || cfg.variant == "segment-offline";
  if (!flat_variant && !segment_variant && cfg.variant != "anis")
    fail(ErrorCode::InvalidArgument, "unknown variant '" + cfg.variant + "'");
  backend_from_name(cfg.backend);
  if (!(cfg.epsilon > 0.0) || !(cfg.epsilon <= 1.0))
    fail(ErrorCode::BadEpsilon, "epsilon must lie in (0, 1]");
  if (flat_variant && (cfg.k < 2 || cfg.k > 6))
    fail(ErrorCode::InvalidArgument,
         "variant '" + cfg.variant + "' needs k in [2, 6]");
  if (cfg.variant == "anis" && (cfg.k < 2 || cfg.k > 5))
    fail(ErrorCode::InvalidArgument, "variant 'anis' needs k in [2, 5]");
  if (cfg.threads < 1)
    fail(ErrorCode::InvalidArgument, "threads must be >= 1");
  if (cfg.budget_structures < 1)
    fail(ErrorCode::InvalidArgument, "budget-structures must be >= 1");
}

std::string record_to_json(const ResultRecord& rec) {
  ojson j;
  j["variant"] = variant_name(rec.result.variant);
  j["distance"] = rec.result.distance;
  j["witness_ids"] = rec.result.witness_ids;
  ojson tau = ojson::array();
  for (const auto& [id, w] : rec.result.tau) tau.push_back(ojson::array({id, w}));
  j["tau"] = std::move(tau);
  j["build_ms"] = rec.build_ms;
  j["query_ms"] = rec.query_ms;
  j["seed"] = rec.seed;
  j["backend"] = rec.backend;
  j["k"] = rec.k;
  j["epsilon"] = rec.epsilon;
  j["version"] = rec.version;
  return j.dump();
}

ResultRecord record_from_json(const std::string& line) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError,
         "json parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  for (const char* key :
       {"variant", "distance", "witness_ids", "tau", "build_ms", "query_ms",
        "seed", "backend", "k", "epsilon", "version"})
    if (!j.contains(key))
      fail(ErrorCode::ParseError,
           std::string("result record is missing '") + key + "'");
  ResultRecord rec;
  rec.result.variant = variant_from_name(j["variant"].get<std::string>());
  rec.result.distance = j["distance"].get<double>();
  rec.result.witness_ids = j["witness_ids"].get<std::vector<std::size_t>>();
  for (const auto& pair : j["tau"]) {
    if (!pair.is_array() || pair.size() != 2)
      fail(ErrorCode::ParseError, "tau entries must be [id, weight] pairs");
    rec.result.tau.emplace_back(pair[0].get<std::size_t>(),
                                pair[1].get<double>());
  }
  rec.build_ms = j["build_ms"].get<double>();
  rec.query_ms = j["query_ms"].get<double>();
  rec.seed = j["seed"].get<std::uint64_t>();
  rec.backend = j["backend"].get<std::string>();
  rec.k = j["k"].get<std::size_t>();
  rec.epsilon = j["epsilon"].get<double>();
  rec.version = j["version"].get<std::string>();
  return rec;
}

}  // namespace sparsegeom
