#include "innoflow/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "innoflow/error.hpp"

namespace innoflow::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool skip_line(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t[0] == '#';
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  return in;
}

double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v))
    throw DataError(where + ": '" + text + "' is not a finite number");
  return v;
}

template <class Int = std::int64_t>
Int parse_int(const std::string& text, const std::string& where) {
  Int v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) throw DataError(where + ": '" + text + "' is not an integer");
  return v;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line); }

}  // namespace

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------- universe

NodeUniverse read_universe(std::istream& in) {
  std::vector<std::string> ids;
  std::vector<bool> eligible;
  bool any_flag = false;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (skip_line(line)) continue;
    const auto f = split_csv(line);
    if (ids.empty() && f[0] == "id") continue;
    if (f.size() > 2) throw DataError("universe " + at_line(n) + ": expected id[,eligible_source]");
    ids.push_back(f[0]);
    if (f.size() == 2) {
      any_flag = true;
      if (f[1] != "0" && f[1] != "1")
        throw DataError("universe " + at_line(n) + ": eligible_source flag must be 0 or 1");
      eligible.push_back(f[1] == "1");
    } else {
      eligible.push_back(true);
    }
  }
  if (ids.empty()) throw DataError("universe file lists no nodes");
  return NodeUniverse(std::move(ids), any_flag ? eligible : std::vector<bool>{});
}

NodeUniverse read_universe(const std::string& path) {
  auto in = open_in(path);
  return read_universe(in);
}

void write_universe(std::ostream& out, const NodeUniverse& nodes) {
  out << "id,eligible_source\n";
  for (std::size_t i = 0; i < nodes.size(); ++i)
    out << nodes.id(i) << ',' << (nodes.is_eligible_source(i) ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------- edge log

namespace {

struct Row {
  std::size_t line;
  Time year;
  std::string source;
  std::string target;
  double weight;
  std::optional<std::string> event_id;
};

void check_event(const std::vector<Row>& rows, WeightMode mode) {
  const std::string where = "edge log " + at_line(rows.front().line);
  std::set<std::pair<std::string, std::string>> seen;
  for (const Row& r : rows) {
    if (r.year != rows.front().year)
      throw DataError(where + ": rows of one event have different years");
    if (!seen.insert({r.source, r.target}).second)
      throw DataError(where + ": event repeats the pair " + r.source + "->" + r.target);
  }
  const double k = static_cast<double>(rows.size());
  double sum = 0.0;
  for (const Row& r : rows) {
    sum += r.weight;
    if (mode == WeightMode::unit) {
      if (r.weight != 1.0)
        throw DataError("edge log " + at_line(r.line) + ": unit mode needs weight 1 on every row");
    } else if (std::abs(r.weight - 1.0 / k) > 1e-9) {
      throw DataError("edge log " + at_line(r.line) + ": weight " + format_double(r.weight) +
                      " differs from 1/" + std::to_string(rows.size()));
    }
  }
  if (mode == WeightMode::fractional && std::abs(sum - 1.0) > 1e-9)
    throw DataError(where + ": event weights sum to " + format_double(sum) + ", not 1");
}

}  // namespace

TemporalEdgeLog read_edge_log(std::istream& in, const std::optional<NodeUniverse>& universe,
                              WeightMode mode) {
  std::string line;
  std::size_t n = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++n;
    if (skip_line(line)) continue;
    header = split_csv(line);
    break;
  }
  if (header.size() < 4 || header[0] != "year" || header[1] != "source" || header[2] != "target" ||
      header[3] != "weight" || header.size() > 5 || (header.size() == 5 && header[4] != "event_id"))
    throw DataError("edge log: header must be year,source,target,weight[,event_id]");
  const bool has_id = header.size() == 5;

  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++n;
    if (skip_line(line)) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size())
      throw DataError("edge log " + at_line(n) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(f.size()));
    Row r{n, parse_int(f[0], "edge log " + at_line(n)), f[1], f[2],
          parse_double(f[3], "edge log " + at_line(n)), std::nullopt};
    if (r.source.empty() || r.target.empty()) throw DataError("edge log " + at_line(n) + ": empty id");
    if (!(r.weight > 0.0)) throw DataError("edge log " + at_line(n) + ": weight must be positive");
    if (has_id) r.event_id = f[4];
    rows.push_back(std::move(r));
  }

  // Group rows into events.
  std::vector<std::vector<Row>> groups;
  if (has_id) {
    std::map<std::string, std::size_t> slot;
    std::string last_id;
    for (Row& r : rows) {
      auto it = slot.find(*r.event_id);
      if (it == slot.end()) {
        slot.emplace(*r.event_id, groups.size());
        groups.emplace_back();
        groups.back().push_back(std::move(r));
      } else {
        if (it->second + 1 != groups.size())
          throw DataError("edge log " + at_line(r.line) + ": rows of event '" + *r.event_id +
                          "' are not contiguous");
        groups.back().push_back(std::move(r));
      }
    }
  } else {
    double acc = 0.0;
    for (Row& r : rows) {
      bool fresh = groups.empty() || groups.back().front().year != r.year ||
                   groups.back().front().source != r.source;
      if (!fresh) {
        if (mode == WeightMode::fractional) {
          fresh = std::abs(acc - 1.0) <= 1e-9;
        } else {
          for (const Row& o : groups.back())
            if (o.target == r.target) fresh = true;
        }
      }
      if (fresh) {
        groups.emplace_back();
        acc = 0.0;
      }
      acc += r.weight;
      groups.back().push_back(std::move(r));
    }
  }

  NodeUniverse nodes;
  if (universe) {
    nodes = *universe;
  } else {
    std::set<std::string> ids, sources;
    for (const auto& g : groups)
      for (const Row& r : g) {
        ids.insert(r.source);
        ids.insert(r.target);
        sources.insert(r.source);
      }
    std::vector<std::string> list(ids.begin(), ids.end());
    std::vector<bool> eligible;
    for (const auto& id : list) eligible.push_back(sources.contains(id));
    nodes = NodeUniverse(list, eligible);
  }

  std::vector<Event> events;
  events.reserve(groups.size());
  for (const auto& g : groups) {
    check_event(g, mode);
    Event ev;
    ev.time = g.front().year;
    for (const Row& r : g) {
      const auto s = nodes.index_of(r.source);
      const auto t = nodes.index_of(r.target);
      if (!s) throw DataError("edge log " + at_line(r.line) + ": unknown node '" + r.source + "'");
      if (!t) throw DataError("edge log " + at_line(r.line) + ": unknown node '" + r.target + "'");
      if (!nodes.is_eligible_source(*s))
        throw DataError("edge log " + at_line(r.line) + ": '" + r.source + "' is not an eligible source");
      ev.flows.push_back({*s, *t});
    }
    if (!events.empty() && ev.time < events.back().time)
      throw DataError("edge log " + at_line(g.front().line) + ": years must be nondecreasing");
    events.push_back(std::move(ev));
  }
  return TemporalEdgeLog(std::move(nodes), std::move(events), mode);
}

TemporalEdgeLog read_edge_log(const std::string& path, const std::optional<NodeUniverse>& universe,
                              WeightMode mode) {
  auto in = open_in(path);
  return read_edge_log(in, universe, mode);
}

void write_edge_log(std::ostream& out, const TemporalEdgeLog& log) {
  out << "year,source,target,weight,event_id\n";
  std::size_t id = 0;
  const NodeUniverse& nodes = log.nodes();
  for (const Event& ev : log.events()) {
    ++id;
    const std::string w = format_double(log.flow_weight(ev));
    for (const Flow& f : ev.flows)
      out << ev.time << ',' << nodes.id(f.source) << ',' << nodes.id(f.target) << ',' << w << ','
          << id << '\n';
  }
}

void write_score_matrix(std::ostream& out, const ScoreMatrix& scores, const NodeUniverse& nodes) {
  out << "source,target," << scores.predictor << '\n';
  for (const EdgePair& p : scores.eligible_pairs())
    out << nodes.id(p.source) << ',' << nodes.id(p.target) << ','
        << format_double(scores.scores(static_cast<Eigen::Index>(p.source), static_cast<Eigen::Index>(p.target)))
        << '\n';
}

// ---------------------------------------------------------------- matrices

namespace {

struct LabeledMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};

// Reads a square labeled matrix from `lines`, starting at the header.
LabeledMatrix parse_square(const std::vector<std::pair<std::size_t, std::string>>& lines,
                           const std::string& what) {
  if (lines.empty()) throw DataError(what + ": missing matrix header");
  auto header = split_csv(lines.front().second);
  if (header.size() < 2) throw DataError(what + ": header needs at least one id");
  LabeledMatrix m;
  m.ids.assign(header.begin() + 1, header.end());
  const std::set<std::string> unique(m.ids.begin(), m.ids.end());
  if (unique.size() != m.ids.size()) throw DataError(what + ": duplicate ids in the header");
  const auto n = static_cast<Eigen::Index>(m.ids.size());
  if (static_cast<Eigen::Index>(lines.size()) - 1 != n)
    throw DataError(what + ": " + std::to_string(lines.size() - 1) + " rows for " +
                    std::to_string(n) + " columns (dimension mismatch)");
  m.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [ln, text] = lines[static_cast<std::size_t>(i + 1)];
    const auto f = split_csv(text);
    const std::string where = what + " " + at_line(ln);
    if (static_cast<Eigen::Index>(f.size()) != n + 1)
      throw DataError(where + ": expected " + std::to_string(n + 1) + " fields (dimension mismatch)");
    if (f[0] != m.ids[static_cast<std::size_t>(i)])
      throw DataError(where + ": row id '" + f[0] + "' does not match column id '" +
                      m.ids[static_cast<std::size_t>(i)] + "'");
    for (Eigen::Index j = 0; j < n; ++j)
      m.values(i, j) = parse_double(f[static_cast<std::size_t>(j + 1)], where);
  }
  return m;
}

std::vector<std::pair<std::size_t, std::string>> content_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!skip_line(line)) out.emplace_back(n, trim(line));
  }
  return out;
}

void write_square(std::ostream& out, const std::vector<std::string>& ids, const Eigen::MatrixXd& v) {
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    out << ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < v.cols(); ++j) out << ',' << format_double(v(i, j));
    out << '\n';
  }
}

}  // namespace

econ::ProximityMatrix read_proximity(std::istream& in, econ::ProximityKind kind) {
  LabeledMatrix m = parse_square(content_lines(in), "matrix");
  return {kind, std::move(m.ids), std::move(m.values)};
}

econ::ProximityMatrix read_proximity(const std::string& path, econ::ProximityKind kind) {
  auto in = open_in(path);
  return read_proximity(in, kind);
}

void write_proximity(std::ostream& out, const econ::ProximityMatrix& p) {
  write_square(out, p.ids, p.values);
}

econ::IoTable read_io_table(std::istream& in) {
  std::map<std::string, std::vector<std::pair<std::size_t, std::string>>> blocks;
  std::string current;
  for (auto& [ln, text] : content_lines(in)) {
    if (text.rfind("block=", 0) == 0) {
      current = trim(text.substr(6));
      if (current != "A" && current != "x" && current != "y" && current != "r" && current != "q" &&
          current != "m")
        throw DataError("io table " + at_line(ln) + ": unknown block '" + current + "'");
      if (blocks.contains(current))
        throw DataError("io table " + at_line(ln) + ": block '" + current + "' repeated");
      blocks[current];
      continue;
    }
    if (current.empty()) throw DataError("io table " + at_line(ln) + ": data before the first block= line");
    blocks[current].emplace_back(ln, text);
  }
  for (const char* b : {"A", "x", "y", "r", "q"})
    if (!blocks.contains(b)) throw DataError(std::string("io table: missing block ") + b);

  econ::IoTable t;
  LabeledMatrix a = parse_square(blocks["A"], "io table block A");
  t.sector_ids = a.ids;
  t.a = a.values;
  auto vec = [&](const std::string& name) {
    const auto& lines = blocks[name];
    std::vector<std::pair<std::size_t, std::string>> rows;
    for (const auto& l : lines) {
      const auto f = split_csv(l.second);
      if (rows.empty() && f.size() == 2 && f[0] == "sector") continue;
      rows.push_back(l);
    }
    if (rows.size() != t.sector_ids.size())
      throw DataError("io table block " + name + ": " + std::to_string(rows.size()) + " rows for " +
                      std::to_string(t.sector_ids.size()) + " sectors (dimension mismatch)");
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto f = split_csv(rows[i].second);
      const std::string where = "io table block " + name + " " + at_line(rows[i].first);
      if (f.size() != 2) throw DataError(where + ": expected sector,value");
      if (f[0] != t.sector_ids[i])
        throw DataError(where + ": sector '" + f[0] + "' out of order, expected '" + t.sector_ids[i] + "'");
      v[static_cast<Eigen::Index>(i)] = parse_double(f[1], where);
    }
    return v;
  };
  t.x = vec("x");
  t.y = vec("y");
  t.r = vec("r");
  t.q = vec("q");
  if (blocks.contains("m")) t.value_added = vec("m");
  t.validate();
  return t;
}

econ::IoTable read_io_table(const std::string& path) {
  auto in = open_in(path);
  return read_io_table(in);
}

void write_io_table(std::ostream& out, const econ::IoTable& t) {
  out << "block=A\n";
  write_square(out, t.sector_ids, t.a);
  auto vec = [&](const char* name, const Eigen::VectorXd& v) {
    out << "block=" << name << "\n";
    for (std::size_t i = 0; i < t.size(); ++i)
      out << t.sector_ids[i] << ',' << format_double(v[static_cast<Eigen::Index>(i)]) << '\n';
  };
  vec("x", t.x);
  vec("y", t.y);
  vec("r", t.r);
  vec("q", t.q);
  if (t.value_added.size() != 0) vec("m", t.value_added);
}

econ::SectorMapping read_mapping(std::istream& in) {
  econ::SectorMapping m;
  bool first = true;
  for (const auto& [ln, text] : content_lines(in)) {
    const auto f = split_csv(text);
    if (first && f.size() >= 2 && f[0] == "sector" && f[1] == "node") {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != 2 && f.size() != 3)
      throw DataError("mapping " + at_line(ln) + ": expected sector,node[,weight]");
    econ::SectorMapping::Entry e{f[0], f[1], 1.0};
    if (f.size() == 3) e.weight = parse_double(f[2], "mapping " + at_line(ln));
    m.entries.push_back(e);
  }
  return m;
}

econ::SectorMapping read_mapping(const std::string& path) {
  auto in = open_in(path);
  return read_mapping(in);
}

// ---------------------------------------------------------------- manifest

std::string sha256_file(const std::string& path) {
  auto in = open_in(path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw DataError("sha256 unavailable");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& kv : params)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  params.emplace_back(key, value);
}

std::optional<std::string> RunManifest::get(const std::string& key) const {
  for (const auto& kv : params)
    if (kv.first == key) return kv.second;
  return std::nullopt;
}

std::string manifest_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"))
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  else
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "tool=innoflow\n";
  out << "version=" << m.version << '\n';
  out << "command=" << m.command << '\n';
  out << "timestamp=" << m.timestamp << '\n';
  if (m.seed) out << "seed=" << *m.seed << '\n';
  for (const auto& [k, v] : m.params) out << "param." << k << '=' << v << '\n';
  for (const auto& [k, v] : m.digests) out << "digest." << k << "=sha256:" << v << '\n';
  for (std::size_t i = 0; i < m.argv.size(); ++i) out << "arg." << i << '=' << m.argv[i] << '\n';
}

RunManifest read_manifest(std::istream& in) {
  RunManifest m;
  std::map<std::size_t, std::string> args;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (skip_line(line)) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("manifest " + at_line(n) + ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "tool") {
      if (value != "innoflow") throw DataError("manifest was not written by innoflow");
    } else if (key == "version") {
      m.version = value;
    } else if (key == "command") {
      m.command = value;
    } else if (key == "timestamp") {
      m.timestamp = value;
    } else if (key == "seed") {
      m.seed = parse_int<std::uint64_t>(value, "manifest " + at_line(n));
    } else if (key.rfind("param.", 0) == 0) {
      m.params.emplace_back(key.substr(6), value);
    } else if (key.rfind("digest.", 0) == 0) {
      if (value.rfind("sha256:", 0) != 0) throw DataError("manifest " + at_line(n) + ": unknown digest");
      m.digests.emplace_back(key.substr(7), value.substr(7));
    } else if (key.rfind("arg.", 0) == 0) {
      args[static_cast<std::size_t>(parse_int(key.substr(4), "manifest " + at_line(n)))] = value;
    } else {
      throw DataError("manifest " + at_line(n) + ": unknown key '" + key + "'");
    }
  }
  std::size_t expect = 0;
  for (const auto& [i, v] : args) {
    if (i != expect++) throw DataError("manifest: argument list has gaps");
    m.argv.push_back(v);
  }
  if (m.command.empty()) throw DataError("manifest has no command");
  return m;
}

RunManifest read_manifest(const std::string& path) {
  auto in = open_in(path);
  return read_manifest(in);
}

}  // namespace innoflow::io
