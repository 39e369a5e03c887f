#pragma once

// Point-set ingestion and result serialization backing the command-line
// tool.  Two on-disk formats are accepted, sniffed from content rather than
// extension: CSV (one point per row, comma-separated decimal fields) and
// JSON ({"dim": d, "points": [[...], ...]}).  JSON is the lossless format:
// doubles are written shortest-round-trip, so save/load reproduces the
// matrix bit for bit.

#include "sparsegeom/bouquet.hpp"
#include "sparsegeom/types.hpp"

#include <cstdint>
#include <string>

namespace sparsegeom {

// Parse from in-memory text.  ParseError messages carry 1-based row/column
// positions (CSV, JSON coordinate entries) or a byte offset (malformed
// JSON); JSON rows of the wrong width raise DimensionMismatch.
PointSet parse_pointset_csv(const std::string& text);
PointSet parse_pointset_json(const std::string& text);

// Serializers.  CSV writes shortest-round-trip decimal fields; JSON writes
// a single {"dim", "points"} object that parse_pointset_json inverts
// bit-identically.
std::string pointset_to_csv(const PointSet& P);
std::string pointset_to_json(const PointSet& P);

// File counterparts.  load_pointset sniffs the format (leading '{' selects
// JSON); both throw ParseError when the file cannot be opened or written.
PointSet load_pointset(const std::string& path);
void save_pointset_csv(const PointSet& P, const std::string& path);
void save_pointset_json(const PointSet& P, const std::string& path);

// Inverse of variant_name; throws InvalidArgument on unknown names.
Variant variant_from_name(const std::string& name);

// Inverse of backend naming ("exact" | "tree"); throws InvalidArgument.
AnnBackend backend_from_name(const std::string& name);
const char* backend_name(AnnBackend backend);

// One parsed command-line invocation.  Paths may stay empty for commands
// that generate their own data (oracle-check, bench) or write to stdout.
struct RunConfig {
  std::string command;            // query | oracle-check | bench | reduce
  std::string input_path;         // --input
  std::string queries_path;       // --queries
  std::string variant = "anif";   // --variant
  std::size_t k = 2;              // --k
  double epsilon = 0.25;          // --epsilon
  std::string backend = "exact";  // --backend
  std::uint64_t seed = 0;         // --seed
  std::size_t threads = 1;        // --threads
  std::string output_path;        // --output ("" = stdout)
  std::size_t budget_structures = kDefaultStructureBudget;
};

// Rejects a config before any structure is built: unknown command, variant
// or backend, k outside the variant's supported range, epsilon outside
// (0, 1], zero threads or budget.  Throws InvalidArgument / BadEpsilon with
// a message naming the offending field.
void validate_config(const RunConfig& cfg);

// One emitted record: the query answer plus timings, the effective
// configuration, and the library version.
struct ResultRecord {
  QueryResult result;
  double build_ms = 0.0;
  double query_ms = 0.0;
  std::string backend = "exact";
  std::size_t k = 2;
  double epsilon = 0.25;
  std::uint64_t seed = 0;
  std::string version = kLibraryVersion;
};

// One JSON Lines record with stable field order (variant, distance,
// witness_ids, tau, build_ms, query_ms, seed, backend, k, epsilon,
// version); record_from_json inverts it losslessly.
std::string record_to_json(const ResultRecord& rec);
ResultRecord record_from_json(const std::string& line);

}  // namespace sparsegeom
