#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "rieszlab/cli.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/trace_io.hpp"

using namespace rieszlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "rieszlab_cli_unit" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

AsymptoticTrace flat_trace(const std::string& id, double g, double s = 3.0) {
  AsymptoticTrace t;
  t.set_id = id;
  t.s = s;
  t.d = 1.0;
  for (std::size_t n = 2; n <= 9; ++n) {
    TraceRecord r;
    r.N = n;
    r.G = g;
    r.E_best = g * std::pow(static_cast<double>(n), 1.0 + s);
    r.N1 = n;
    r.frac1 = 1.0;
    r.min_dist = 1.0 / static_cast<double>(n);
    r.status = "heuristic";
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorKind::Validation) == 2);
  CHECK(exit_code_for(ErrorKind::Infeasible) == 3);
  CHECK(exit_code_for(ErrorKind::InfiniteEnergy) == 3);
  CHECK(exit_code_for(ErrorKind::Io) == 4);
}

TEST_CASE("solve on a segment writes a result document") {
  const fs::path dir = scratch("solve");
  write_file_atomic((dir / "seg.json").string(), R"({"type":"segment","a":[0],"b":[1]})");
  const auto r = run({"solve", "--config", (dir / "seg.json").string(), "--s", "2", "--n", "3", "--restarts", "4",
                      "--no-cache", "--out", (dir / "result.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("N=3") != std::string::npos);
  const Json j = read_json_file((dir / "result.json").string());
  CHECK(j.at("energy").get<double>() == doctest::Approx(18.0).epsilon(1e-9));
  CHECK(j.at("N").get<std::size_t>() == 3);
  CHECK(j.at("per_point").size() == 3);
  CHECK(j.at("status") == "heuristic");
}

TEST_CASE("exponent at or below the dimension is rejected") {
  const auto r = run({"solve", "--preset", "example-a2", "--s", "1", "--n", "3", "--no-cache"});
  CHECK(r.code == 2);
  const Json e = Json::parse(r.err);
  CHECK(e.at("error").at("kind") == "validation");
  CHECK(r.out.empty());
}

TEST_CASE("union violating the separation condition is rejected") {
  const fs::path dir = scratch("badunion");
  write_file_atomic((dir / "u.json").string(), R"({"type":"union","A1":{"preset":"example-a1"},
      "A2":{"type":"segment","a":[1.2,0],"b":[2,0]}})");
  const auto r = run({"solve", "--config", (dir / "u.json").string(), "--s", "3", "--n", "4", "--no-cache"});
  CHECK(r.code == 2);
  CHECK(r.err.find("diameter/separation") != std::string::npos);
}

TEST_CASE("unknown config keys and missing files") {
  const fs::path dir = scratch("keys");
  write_file_atomic((dir / "c.json").string(), R"({"set":{"preset":"example-a2"},"s":2,"colour":1})");
  CHECK(run({"solve", "--config", (dir / "c.json").string(), "--no-cache"}).code == 2);
  CHECK(run({"solve", "--config", (dir / "absent.json").string()}).code == 4);
  CHECK(run({"report", (dir / "absent.csv").string()}).code == 4);
}

TEST_CASE("sweep reruns hit the cache and deterministic output is byte-identical") {
  const fs::path dir = scratch("sweep");
  const std::vector<std::string> base{"sweep", "--preset", "example-a2", "--s", "2", "--n-min", "2", "--n-max", "6",
                                      "--restarts", "3", "--deterministic"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  const std::string cache = (dir / "cache.json").string();
  const auto first = run(with({"--cache", cache, "--out", (dir / "a").string()}));
  REQUIRE(first.code == 0);
  CHECK(first.out.find("solves=5") != std::string::npos);
  const auto again = run(with({"--cache", cache, "--out", (dir / "b").string()}));
  REQUIRE(again.code == 0);
  CHECK(again.out.find("solves=0 cache_hits=5") != std::string::npos);
  const auto forced = run(with({"--cache", cache, "--out", (dir / "c").string(), "--force"}));
  CHECK(forced.out.find("solves=5") != std::string::npos);

  const auto fresh1 = run(with({"--cache", (dir / "c1.json").string(), "--out", (dir / "d1").string()}));
  const auto fresh2 = run(with({"--cache", (dir / "c2.json").string(), "--out", (dir / "d2").string()}));
  REQUIRE(fresh1.code == 0);
  REQUIRE(fresh2.code == 0);
  CHECK(read_file((dir / "d1" / "trace.csv").string()) == read_file((dir / "d2" / "trace.csv").string()));
  const Json summary = read_json_file((dir / "d1" / "summary.json").string());
  CHECK(summary.at("traces").at(0).at("records") == 5);
}

TEST_CASE("report on equal components predicts an even split") {
  const fs::path dir = scratch("report");
  write_trace_csv((dir / "a.csv").string(), flat_trace("aaaaaaaaaaaaaaaa", 0.8));
  write_trace_csv((dir / "b.csv").string(), flat_trace("bbbbbbbbbbbbbbbb", 0.8));
  const auto r = run({"report", (dir / "a.csv").string(), (dir / "b.csv").string(), "--out",
                      (dir / "summary.json").string()});
  REQUIRE(r.code == 0);
  const Json j = read_json_file((dir / "summary.json").string());
  CHECK(j.at("prediction").at("alpha_star").get<double>() == 0.5);
  CHECK(j.at("prediction").at("provenance") == "estimated");
  CHECK(j.at("traces").at(0).at("lemma3_flags").empty());

  write_trace_csv((dir / "c.csv").string(), flat_trace("cccccccccccccccc", 0.8, 4.0));
  const auto mixed = run({"report", (dir / "a.csv").string(), (dir / "c.csv").string()});
  CHECK(mixed.code == 2);
  CHECK(mixed.err.find("incompatible") != std::string::npos);
}

TEST_CASE("report rejects an unknown trace schema") {
  const fs::path dir = scratch("schema");
  std::string text = format_trace_csv(flat_trace("aaaaaaaaaaaaaaaa", 1.0));
  text.replace(text.find("schema_version=1"), 16, "schema_version=9");
  write_file_atomic((dir / "t.csv").string(), text);
  const auto r = run({"report", (dir / "t.csv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("schema_version") != std::string::npos);
}

TEST_CASE("short traces get a null gamma") {
  const fs::path dir = scratch("short");
  AsymptoticTrace t = flat_trace("aaaaaaaaaaaaaaaa", 1.0);
  t.records.resize(3);
  write_trace_csv((dir / "t.csv").string(), t);
  const auto r = run({"report", (dir / "t.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).at("traces").at(0).at("gamma").is_null());
}

}  // TEST_SUITE
