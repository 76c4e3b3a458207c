#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "gdm/cli.hpp"
#include "gdm/rational.hpp"
#include "support/oracles.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = gdm::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gdm_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kLinear = R"({"kind":"linear","params":{"weights":["1/3","2/3"]}})";
const std::string kKusuoka = R"({"kind":"kusuoka","params":{"y0":[1,0]}})";
const std::string kMinkowski = R"({"kind":"minkowski"})";
const std::string kMoebius = R"({"kind":"moebius","params":{"C":1}})";

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("systems listing") {
  Run r = run({"systems"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["kinds"].size() >= 6);
  std::string all;
  for (const auto& k : j["kinds"]) all += k["kind"].get<std::string>() + " ";
  CHECK(all.find("kusuoka") != std::string::npos);
  CHECK(all.find("minkowski") != std::string::npos);
  CHECK(all.find("derham_lft") != std::string::npos);
}

TEST_CASE("eval tables") {
  Run r = run({"eval", "--system", kMinkowski, "--points", "dyadic:2"});
  REQUIRE(r.code == 0);
  auto lines = csv_lines(r.out);
  CHECK(lines[0] == "t,phi,phi_exact,error_bound");
  CHECK(split(lines[2])[0] == "1/4");
  CHECK(split(lines[2])[2] == "1/3");

  Run m = run({"eval", "--system", kMoebius, "--points", "dyadic:6"});
  REQUIRE(m.code == 0);
  auto rows = csv_lines(m.out);
  REQUIRE(rows.size() == 66);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto cells = split(rows[i]);
    gdm::Rational t = gdm::parse_rational(cells[0]);
    CHECK(gdm::parse_rational(cells[2]) == oracle::moebius_f(gdm::Rational(1), t));
  }
}

TEST_CASE("dim reports") {
  Run c = run({"dim", "--system", kLinear, "--method", "closed"});
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["report"]["estimate"].get<double>() == doctest::Approx(0.918296).epsilon(1e-6));

  Run k = run({"dim", "--system", kKusuoka, "--method", "mc", "--n", "500", "--paths", "40"});
  REQUIRE(k.code == 0);
  json kr = json::parse(k.out)["report"];
  CHECK(kr["upper_bound"].get<double>() < std::log(3.0) / std::log(2.0));
  CHECK(kr["estimate"].get<double>() > 0.3);

  Run a = run({"dim", "--system", R"({"kind":"adf","params":{"y0":0}})", "--method", "mc", "--n", "500", "--paths", "40"});
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out)["report"]["upper_bound"].get<double>() < 1.0);

  Run mk = run({"dim", "--system", kMinkowski, "--method", "mc", "--n", "300", "--paths", "20"});
  REQUIRE(mk.code == 0);
  json mr = json::parse(mk.out)["report"];
  CHECK(mr["lower_bound"].is_null());
  CHECK(mr["lower_source"].get<std::string>().find("unknown") != std::string::npos);

  Run f = run({"dim", "--system", kMoebius, "--method", "fanlau"});
  REQUIRE(f.code == 0);
  CHECK(json::parse(f.out)["report"]["estimate"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("check verdicts") {
  auto status = [](const Run& r) { return json::parse(r.out)["verdicts"][0]["status"].get<std::string>(); };
  Run k = run({"check", "--system", kKusuoka, "--conditions", "A"});
  REQUIRE(k.code == 0);
  CHECK(status(k) == "HOLDS_AT_RESOLUTION");
  Run m = run({"check", "--system", kMinkowski, "--conditions", "A"});
  REQUIRE(m.code == 0);
  CHECK(status(m) == "FAILS_WITH_WITNESS");
  Run f = run({"check", "--system", R"({"kind":"toy","params":{"name":"fixedpoint_half"}})", "--conditions", "B"});
  REQUIRE(f.code == 0);
  CHECK(status(f) == "FAILS_WITH_WITNESS");
  Run all = run({"check", "--system", kKusuoka, "--conditions", "A,wA,B,sB"});
  REQUIRE(all.code == 0);
  CHECK(json::parse(all.out)["verdicts"].size() == 4);
}

TEST_CASE("singularity verdicts") {
  auto verdict = [](const Run& r) { return json::parse(r.out)["report"]["verdict"].get<std::string>(); };
  Run k = run({"singularity", "--system", kKusuoka, "--no-hellinger"});
  REQUIRE(k.code == 0);
  CHECK(verdict(k) == "SINGULAR_CERTIFIED");
  Run e = run({"singularity", "--system", R"({"kind":"bernoulli_equiv","params":{"p":["1/2","1/2"],"e0":1}})",
               "--no-hellinger"});
  REQUIRE(e.code == 0);
  CHECK(verdict(e) == "AC_CERTIFIED");
  Run t = run({"singularity", "--system", R"({"kind":"toy","params":{"name":"three_state","p":"1/3"}})", "--T", "2000",
               "--paths", "8"});
  REQUIRE(t.code == 0);
  CHECK(verdict(t) == "INCONCLUSIVE");
}

TEST_CASE("structured errors leave no output files") {
  TempDir dir;
  struct Case {
    std::vector<std::string> args;
    int code;
    std::string kind;
  };
  std::vector<Case> cases{
      {{"eval", "--system", R"({"kind":"adf","params":{"y0":2}})"}, 2, "config"},
      {{"eval", "--system", R"({"kind":"nope"})"}, 2, "config"},
      {{"eval", "--system", dir / "missing.json"}, 2, "config"},
      {{"density", "--system", kMinkowski}, 3, "domain"},
      {{"curve", "--system", kMinkowski, "--depth", "30"}, 5, "budget"},
      {{"dim", "--system", kLinear, "--method", "exact", "--n", "30"}, 5, "budget"},
      {{"density", "--system", kMoebius, "--max-sweeps", "2", "--tol", "1e-14"}, 6, "convergence"},
      {{"dim", "--system", kLinear, "--bogus"}, 2, "usage"},
  };
  for (const Case& c : cases) {
    std::vector<std::string> args = c.args;
    args.insert(args.end(), {"--out", dir / "out.txt", "--manifest", dir / "manifest.json"});
    if (c.kind == "usage") args = c.args;
    Run r = run(args);
    INFO(c.args[0] << " " << c.kind);
    CHECK(r.code == c.code);
    CHECK(r.out.empty());
    json e = json::parse(r.err);
    CHECK(e["error"]["kind"] == c.kind);
    CHECK(!e["error"]["message"].get<std::string>().empty());
    CHECK_FALSE(fs::exists(dir / "out.txt"));
    CHECK_FALSE(fs::exists(dir / "manifest.json"));
  }
  CHECK(fs::is_empty(dir.path));
}

TEST_CASE("manifests describe the run") {
  TempDir dir;
  Run r = run({"trace", "--system", kLinear, "--n", "50", "--out", dir / "t.csv", "--manifest", dir / "m.json"});
  REQUIRE(r.code == 0);
  json m = json::parse(slurp(dir / "m.json"));
  CHECK(m["command"] == "trace");
  CHECK(m["tool_version"] == gdm::kToolVersion);
  CHECK(m["seed"] == 20240601);
  CHECK(m["parameters"]["n"] == "50");
  CHECK(m["config_sha256"] == gdm::sha256_hex(kLinear));
  REQUIRE(m["outputs"].size() == 1);
  CHECK(m["outputs"][0]["sha256"] == gdm::sha256_hex(slurp(dir / "t.csv")));
  CHECK(gdm::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("reruns are byte-identical across thread counts") {
  TempDir dir;
  std::vector<std::vector<std::string>> commands{
      {"systems"},
      {"eval", "--system", kMinkowski, "--points", "dyadic:8"},
      {"dim", "--system", kKusuoka, "--method", "mc", "--n", "300", "--paths", "24"},
      {"dim", "--system", kMinkowski, "--method", "kinney", "--samples", "5000"},
      {"check", "--system", kKusuoka, "--conditions", "A,B"},
      {"singularity", "--system", kKusuoka, "--T", "2000", "--paths", "8"},
      {"trace", "--system", kKusuoka, "--n", "200", "--stream", "3"},
      {"curve", "--system", kMinkowski, "--depth", "8"},
      {"density", "--system", kMoebius, "--m", "257"},
  };
  for (const auto& base : commands) {
    INFO(base[0]);
    std::vector<std::string> outputs, manifests;
    for (const char* threads : {"1", "4", "1"}) {
      std::vector<std::string> args = base;
      std::string tag = base[0] + "_" + threads + "_" + std::to_string(outputs.size());
      args.insert(args.end(), {"--out", dir / (tag + ".out"), "--manifest", dir / (tag + ".json")});
      if (base[0] != "systems" && base[0] != "eval" && base[0] != "check" && base[0] != "curve" && base[0] != "density") {
        args.insert(args.end(), {"--threads", threads});
      }
      Run r = run(args);
      REQUIRE(r.code == 0);
      outputs.push_back(slurp(dir / (tag + ".out")));
      json m = json::parse(slurp(dir / (tag + ".json")));
      for (auto& o : m["outputs"]) o.erase("path");
      manifests.push_back(m.dump());
    }
    CHECK(!outputs[0].empty());
    CHECK(outputs[0] == outputs[1]);
    CHECK(outputs[0] == outputs[2]);
    CHECK(manifests[0] == manifests[1]);
    CHECK(manifests[0] == manifests[2]);
  }
}
