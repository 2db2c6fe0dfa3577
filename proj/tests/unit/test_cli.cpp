#include "doctest.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "innoflow/cli.hpp"
#include "innoflow/io.hpp"

namespace fs = std::filesystem;
using namespace innoflow;

namespace {

const std::string data_dir = INNOFLOW_TEST_DATA;
const std::string fixture_log = data_dir + "/fixture_log.csv";
const std::string fixture_universe = data_dir + "/fixture_universe.csv";
const std::string fixture_io = data_dir + "/fixture_io.csv";
const std::string fixture_map = data_dir + "/fixture_map.csv";

struct Result {
  int code = 0;
  std::string out, err;
  double seconds = 0.0;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  r.code = cli::run(args, out, err);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

// fixture commands, each with its own output directory appended
std::vector<std::vector<std::string>> fixture_commands(const fs::path& proximity) {
  const std::vector<std::string> log = {"--edge-log", fixture_log, "--universe", fixture_universe};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  return {
      {"simulate", "--nodes", "5", "--eligible", "4", "--horizon", "200", "--seed", "3"},
      {"simulate", "--universe", fixture_universe, "--alpha", "0.9", "--lambda", "1", "--m", "2", "--horizon", "100",
       "--weight-mode", "unit", "--seed", "4"},
      with({"fit", "pwa-two-step"}, log),
      with({"fit", "evolution"}, with(log, {"--proximity", "los=" + proximity.string()})),
      with({"fit", "evolution", "--spec", "loglog"}, with(log, {"--proximity", "los=" + proximity.string()})),
      with({"fit", "stimulus"}, log),
      with({"metrics"}, with(log, {"--until", "2001", "--predictors", "pwa,pa,common_neighbors,jaccard,adamic_adar,katz,random"})),
      with({"predict", "--seed", "2"}, log),
      with({"stimulus"}, log),
      {"econ", "--table", fixture_io, "--map", fixture_map, "--kind", "leontief", "--drop-diagonal"},
      {"econ", "--table", fixture_io, "--map", fixture_map, "--kind", "rd_flows"},
      {"econ", "--table", fixture_io, "--kind", "los", "--orientation", "columns"},
      {"econ", "--table", fixture_io, "--map", fixture_map, "--kind", "gravity", "--g", "2"},
      with({"structure"}, log),
  };
}

}  // namespace

TEST_CASE("error line format") {
  CHECK(cli::error_line("data", 3, "bad row") == "innoflow: error kind=data code=3: bad row");
}

TEST_CASE("every command runs on the fixture") {
  const fs::path econ_dir = scratch("econ_los");
  REQUIRE(call({"econ", "--table", fixture_io, "--map", fixture_map, "--kind", "los", "--out", econ_dir.string()}).code == 0);
  const fs::path proximity = econ_dir / "proximity_los.csv";
  REQUIRE(fs::exists(proximity));

  int k = 0;
  for (auto args : fixture_commands(proximity)) {
    const fs::path out = scratch("cmd" + std::to_string(k++));
    args.push_back("--out");
    args.push_back(out.string());
    const Result r = call(args);
    INFO(args[0] << (args.size() > 1 ? " " + args[1] : "") << ": " << r.err);
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(r.seconds < 1.0);
    // exactly one manifest per output directory
    CHECK(fs::exists(out / "manifest.txt"));
    const io::RunManifest m = io::read_manifest((out / "manifest.txt").string());
    CHECK(m.argv == args);
    CHECK(m.version == io::tool_version);
  }
}

TEST_CASE("fit output carries key=value blocks") {
  const fs::path out = scratch("fit_kv");
  REQUIRE(call({"fit", "stimulus", "--edge-log", fixture_log, "--out", out.string()}).code == 0);
  const std::string fit = slurp(out / "fit.txt");
  for (const char* key : {"coefficient", "se", "se_type", "n=", "r2="}) CHECK(fit.find(key) != std::string::npos);

  const fs::path m = scratch("metrics_kv");
  REQUIRE(call({"metrics", "--edge-log", fixture_log, "--predictors", "pwa", "--out", m.string()}).code == 0);
  CHECK(slurp(m / "scores_pwa.csv").rfind("source,target,pwa\n", 0) == 0);
}

TEST_CASE("manifest records inputs and seed") {
  const fs::path out = scratch("manifest");
  REQUIRE(call({"predict", "--edge-log", fixture_log, "--seed", "11", "--out", out.string()}).code == 0);
  const io::RunManifest m = io::read_manifest((out / "manifest.txt").string());
  CHECK(m.command == "predict");
  REQUIRE(m.digests.size() == 1u);
  CHECK(m.digests[0].first == fixture_log);
  CHECK(m.digests[0].second == io::sha256_file(fixture_log));
  CHECK(m.seed == std::optional<std::uint64_t>(11));
  CHECK(m.get("period-length").has_value());
}

TEST_CASE("runs are deterministic and replayable") {
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const std::vector<std::string> report = {"report", "--seed", "7", "--horizon", "3000", "--periods", "5"};
  const fs::path a = scratch("report_a"), b = scratch("report_b"), c = scratch("report_c");
  auto args_a = report, args_b = report;
  args_a.insert(args_a.end(), {"--out", a.string()});
  args_b.insert(args_b.end(), {"--out", b.string()});
  const Result ra = call(args_a);
  REQUIRE_MESSAGE(ra.code == 0, ra.err);
  REQUIRE(call(args_b).code == 0);
  auto fa = files(a), fb = files(b);
  // the manifests differ only in --out
  CHECK(fa.size() == fb.size());
  for (const auto& [name, body] : fa)
    if (name != "manifest.txt") CHECK_MESSAGE(body == fb[name], name);

  REQUIRE(call({"replay", (a / "manifest.txt").string(), "--out", c.string()}).code == 0);
  const auto fc = files(c);
  for (const auto& [name, body] : fa)
    if (name != "manifest.txt") CHECK_MESSAGE(body == fc.at(name), name);

  const fs::path s1 = scratch("sim_a"), s2 = scratch("sim_b");
  REQUIRE(call({"simulate", "--profile", "sweden", "--horizon", "2000", "--seed", "7", "--out", s1.string()}).code == 0);
  REQUIRE(call({"replay", (s1 / "manifest.txt").string(), "--out", s2.string()}).code == 0);
  CHECK(slurp(s1 / "edge_log.csv") == slurp(s2 / "edge_log.csv"));
  // with the epoch fixed and the same --out the manifest is byte-identical as well
  const std::string before = slurp(s1 / "manifest.txt");
  REQUIRE(call({"replay", (s1 / "manifest.txt").string()}).code == 0);
  CHECK(slurp(s1 / "manifest.txt") == before);
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("replay refuses changed inputs") {
  const fs::path copy = scratch("copy");
  fs::create_directories(copy);
  const fs::path log = copy / "log.csv";
  fs::copy_file(fixture_log, log);
  const fs::path out = scratch("replay_changed");
  REQUIRE(call({"stimulus", "--edge-log", log.string(), "--out", out.string()}).code == 0);
  {
    std::ofstream f(log, std::ios::app);
    f << "2004,a,b,1,99\n";
  }
  const Result r = call({"replay", (out / "manifest.txt").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("changed") != std::string::npos);
}

TEST_CASE("exit codes and single error line") {
  const std::regex line(R"(innoflow: error kind=(usage|data|numeric) code=[234]: [^\n]+\n)");
  auto expect = [&](std::vector<std::string> args, int code) {
    const Result r = call(args);
    INFO(r.err);
    CHECK(r.code == code);
    CHECK(std::regex_match(r.err, line));
  };
  const std::string out = scratch("errors").string();
  expect({"frobnicate"}, 2);
  expect({"metrics", "--edge-log", fixture_log, "--bogus", "--out", out}, 2);
  expect({"simulate", "--horizon", "10", "--out", out}, 2);  // seed is mandatory
  expect({"simulate", "--alpha", "1.5", "--seed", "1", "--out", out}, 2);
  expect({"metrics", "--edge-log", fixture_log, "--predictors", "nope", "--out", out}, 2);
  expect({"metrics", "--edge-log", data_dir + "/missing.csv", "--out", out}, 3);
  expect({"econ", "--table", fixture_log, "--kind", "leontief", "--out", out}, 3);

  const fs::path bad = scratch("bad_inputs");
  fs::create_directories(bad);
  {
    std::ofstream f(bad / "log.csv");
    f << "year,source,target,weight\n2000,a,b,0.7\n";
  }
  expect({"stimulus", "--edge-log", (bad / "log.csv").string(), "--out", out}, 3);
  {
    std::ofstream f(bad / "io.csv");
    f << "block=A\nid,s1,s2\ns1,0.6,0.5\ns2,0.5,0.6\nblock=x\ns1,1\ns2,1\nblock=y\ns1,1\ns2,1\n"
         "block=r\ns1,1\ns2,1\nblock=q\ns1,1\ns2,1\n";
  }
  const Result radius = call({"econ", "--table", (bad / "io.csv").string(), "--kind", "leontief", "--out", out});
  CHECK(radius.code == 4);
  CHECK(radius.err.find("kind=numeric code=4") != std::string::npos);
  CHECK(radius.err.find("spectral radius") != std::string::npos);
  // the fixture is acyclic, so Katz needs a cycle to fail
  {
    std::ofstream f(bad / "cycle.csv");
    f << "year,source,target,weight\n2000,a,b,1\n2000,b,a,1\n";
  }
  expect({"metrics", "--edge-log", (bad / "cycle.csv").string(), "--predictors", "katz", "--beta", "50", "--out", out}, 4);

  const Result help = call({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("simulate then fit recovers the profile") {
  const fs::path sim = scratch("e2e_sim"), fit = scratch("e2e_fit");
  REQUIRE(call({"simulate", "--profile", "sweden", "--horizon", "20000", "--seed", "7", "--out", sim.string()}).code == 0);
  const Result r = call({"fit", "pwa-two-step", "--edge-log", (sim / "edge_log.csv").string(), "--universe",
                         (sim / "universe.csv").string(), "--out", fit.string()});
  REQUIRE(r.code == 0);
  const std::regex kv(R"(lambda_hat=([-0-9.e]+) alpha_hat=([-0-9.e]+))");
  std::smatch m;
  REQUIRE(std::regex_search(r.out, m, kv));
  MESSAGE(r.out);
  CHECK(std::stod(m[1]) == doctest::Approx(0.649).epsilon(0.05 / 0.649));
  CHECK(std::stod(m[2]) == doctest::Approx(0.855).epsilon(0.05 / 0.855));
}
