#pragma once

// Text formats: edge logs, node universes, score and proximity matrices,
// input-output tables, sector mappings and run manifests. All are plain
// comma-separated text; ids may not contain commas.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "innoflow/econ.hpp"
#include "innoflow/netcore.hpp"
#include "innoflow/score_matrix.hpp"

namespace innoflow::io {

/// Splits one CSV line on commas and trims blanks around each field.
std::vector<std::string> split_csv(const std::string& line);

/// One id per line, optionally `id,flag` with flag 0/1 (eligible source).
/// A header line starting with "id" is skipped, as are blank lines and
/// lines starting with '#'.
NodeUniverse read_universe(std::istream& in);
NodeUniverse read_universe(const std::string& path);
void write_universe(std::ostream& out, const NodeUniverse& nodes);

/// Header `year,source,target,weight[,event_id]`. Without event_id, an
/// event is a run of consecutive rows sharing (year, source): in fractional
/// mode it closes once its weights reach 1, in unit mode at the first
/// repeated target or change of (year, source). Fractional events must carry
/// weight 1/k on each of their k rows (sum 1 within 1e-9); unit events carry
/// 1 per row. Without a universe the node set is every id seen, sorted, and
/// the eligible sources are the ids seen as a source.
TemporalEdgeLog read_edge_log(std::istream& in, const std::optional<NodeUniverse>& universe,
                              WeightMode mode = WeightMode::fractional);
TemporalEdgeLog read_edge_log(const std::string& path, const std::optional<NodeUniverse>& universe,
                              WeightMode mode = WeightMode::fractional);
/// Always writes the event_id column (1-based event order).
void write_edge_log(std::ostream& out, const TemporalEdgeLog& log);

/// `source,target,score` over the eligible pairs.
void write_score_matrix(std::ostream& out, const ScoreMatrix& scores, const NodeUniverse& nodes);

/// Square matrix with a header row of ids (first cell ignored) and the id
/// in the first column of each row; row ids must repeat the header order.
econ::ProximityMatrix read_proximity(std::istream& in, econ::ProximityKind kind);
econ::ProximityMatrix read_proximity(const std::string& path, econ::ProximityKind kind);
void write_proximity(std::ostream& out, const econ::ProximityMatrix& p);

/// Blocks introduced by `block=A`, `block=x`, `block=y`, `block=r`,
/// `block=q` and optionally `block=m` (value added). A is a square matrix in
/// the proximity layout; vectors are `sector,value` rows in the sector order
/// of A. The table is validated before it is returned.
econ::IoTable read_io_table(std::istream& in);
econ::IoTable read_io_table(const std::string& path);
void write_io_table(std::ostream& out, const econ::IoTable& table);

/// `sector,node[,weight]` rows, weight defaulting to 1. Header optional.
econ::SectorMapping read_mapping(std::istream& in);
econ::SectorMapping read_mapping(const std::string& path);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

inline constexpr const char* tool_version = "1.0.0";

/// key=value record of one run. Fields are written in insertion order.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // arguments after the program name
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::pair<std::string, std::string>> digests;  // path -> sha256
  std::optional<std::uint64_t> seed;
  std::string version = tool_version;
  std::string timestamp;

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
};

/// Current UTC time as ISO 8601, or SOURCE_DATE_EPOCH when it is set.
std::string manifest_timestamp();

void write_manifest(std::ostream& out, const RunManifest& m);
RunManifest read_manifest(std::istream& in);
RunManifest read_manifest(const std::string& path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace innoflow::io
