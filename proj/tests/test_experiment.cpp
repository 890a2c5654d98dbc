#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "falm/error.hpp"
#include "falm/experiment.hpp"

using namespace falm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("falm_test_experiment_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json small_config(const fs::path& out) {
  json doc = json::parse(R"({
    "problem": {"kind": "random_qp", "n": 12, "p": 3, "seed": 4, "cond": 20},
    "rate_window": [20, 400],
    "runs": [
      {"label": "nes", "rule": "nesterov", "max_iter": 400},
      {"label": "cd4", "rule": {"rule": "chambolle_dossal", "alpha": 4}, "gamma": 0.84, "max_iter": 400}
    ]
  })");
  doc["output_dir"] = out.string();
  return doc;
}

fs::path write_json(const fs::path& path, const json& doc) {
  std::ofstream(path) << doc.dump(2);
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config") {
  const ExperimentConfig cfg = parse_config(small_config("o"));
  REQUIRE(cfg.runs.size() == 2);
  CHECK(cfg.runs[1].params.rule.kind() == RuleKind::chambolle_dossal);
  CHECK(*cfg.runs[1].params.gamma == 0.84);
  CHECK(cfg.window_lo == 20);
  CHECK(cfg.window_hi == 400);

  json dup = small_config("o");
  dup["runs"][1]["label"] = "nes";
  CHECK_THROWS_AS(parse_config(dup), InvalidArgument);
}

TEST_CASE("materialize inline and generated problems") {
  const Instance gen = materialize(json::parse(R"({"kind": "random_qp", "n": 6, "p": 2})"));
  CHECK(gen.star.has_value());
  const Instance inl = materialize(json::parse(R"({
    "n": 2, "p": 1, "A": [1, 1], "b": [2],
    "objective": {"kind": "quadratic", "Q": [1, 0, 0, 1], "c": [0, 0]}})"));
  REQUIRE(inl.star.has_value());
  CHECK(inl.star->x[0] == doctest::Approx(1.0));
  const Instance unc = materialize(json::parse(R"({"kind": "unconstrained", "n": 6, "p": 2})"));
  CHECK_FALSE(unc.star.has_value());
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.0}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("cmd_run writes per-run CSVs and a summary") {
  const fs::path dir = scratch("run");
  const fs::path cfg = write_json(dir / "cfg.json", small_config(dir / "out"));
  std::ostringstream log;
  REQUIRE(cmd_run(cfg, {}, log) == 0);
  const std::string csv = slurp(dir / "out" / "cd4.csv");
  CHECK(csv.rfind("k,t_k,gap,feas,obj_err,kkt_grad,kkt_feas,energy,cg_iters\n", 0) == 0);
  const json summary = json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(summary.at("runs").size() == 2);
  CHECK(summary.at("oracle").get<bool>());

  // Byte-identical reruns, also with a different thread count.
  CliOptions opts;
  opts.output_dir = dir / "out2";
  opts.threads = 1;
  REQUIRE(cmd_run(cfg, opts, log) == 0);
  CHECK(slurp(dir / "out2" / "cd4.csv") == csv);
  CHECK(slurp(dir / "out2" / "nes.csv") == slurp(dir / "out" / "nes.csv"));
}

TEST_CASE("cmd_run --runs filter") {
  const fs::path dir = scratch("filter");
  const fs::path cfg = write_json(dir / "cfg.json", small_config(dir / "out"));
  CliOptions opts;
  opts.only = {"cd4"};
  std::ostringstream log;
  REQUIRE(cmd_run(cfg, opts, log) == 0);
  CHECK(fs::exists(dir / "out" / "cd4.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "nes.csv"));
  opts.only = {"missing"};
  CHECK(cmd_run(cfg, opts, log) == 2);
}

TEST_CASE("cmd_run rejects a step size above the bound") {
  const fs::path dir = scratch("sigma");
  json doc = small_config(dir / "out");
  doc["runs"][0]["sigma"] = 10.0;
  const fs::path cfg = write_json(dir / "cfg.json", doc);
  std::ostringstream log;
  CHECK(cmd_run(cfg, {}, log) == 2);
  CHECK(log.str().find("σ ≤ γ/(L + γβ‖A‖²)") != std::string::npos);
}

TEST_CASE("cmd_compare") {
  const fs::path dir = scratch("compare");
  json doc = small_config(dir / "out");
  doc["runs"][1] = doc["runs"][0];
  doc["runs"][1]["label"] = "nes_copy";
  const fs::path cfg = write_json(dir / "cfg.json", doc);
  std::ostringstream log;
  REQUIRE(cmd_compare(cfg, {}, log) == 0);
  CHECK(log.str().find("| nes_copy |") != std::string::npos);

  // Identical settings give identical rows apart from the label column.
  std::ifstream in(dir / "out" / "compare.csv");
  std::string line;
  std::getline(in, line);
  std::vector<std::string> a, b;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    (line.rfind("nes_copy,", 0) == 0 ? b : a).push_back(line.substr(comma));
  }
  CHECK(a.size() == 401);
  CHECK(a == b);

  json empty = small_config(dir / "out");
  empty["runs"] = json::array();
  CHECK(cmd_compare(write_json(dir / "empty.json", empty), {}, log) == 2);
  CliOptions one;
  one.only = {"nes"};
  CHECK(cmd_compare(cfg, one, log) == 2);
}

TEST_CASE("cmd_ratecheck") {
  const fs::path dir = scratch("ratecheck");
  const fs::path cfg = write_json(dir / "cfg.json", small_config(dir / "out"));
  const fs::path ok = write_json(dir / "ok.json", json::parse(R"({"thresholds": [
    {"metric": "energy_monotone"}, {"metric": "gap_bound"}, {"metric": "feas_bound"}]})"));
  std::ostringstream log;
  CHECK(cmd_ratecheck(cfg, ok, {}, log) == 0);
  CHECK(fs::exists(dir / "out" / "ratecheck.json"));

  // A slope the accelerated runs cannot reach on this window.
  const fs::path bad = write_json(dir / "bad.json", json::parse(R"({"thresholds": [
    {"metric": "feas", "label": "nes", "max_slope": -30}]})"));
  std::ostringstream log2;
  CHECK(cmd_ratecheck(cfg, bad, {}, log2) == 1);
  CHECK(log2.str().find("first violation: metric feas") != std::string::npos);
}
