#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// The binary under test arrives via the environment so the suite does not
// depend on build layout.
std::string cli_path() {
  const char* p = std::getenv("BOOLMARK_CLI");
  return p ? std::string(p) : std::string();
}

#define REQUIRE_CLI()                                   \
  const std::string cli = cli_path();                   \
  if (cli.empty()) {                                    \
    MESSAGE("BOOLMARK_CLI not set, skipping CLI test"); \
    return;                                             \
  }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("boolmark_cli_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

struct CmdResult {
  int status = -1;
  std::string output;
};

CmdResult run_cli(const std::string& cli, const std::string& args) {
  static int counter = 0;
  const fs::path capture =
      fs::temp_directory_path() / ("boolmark_cli_capture_" + std::to_string(counter++));
  const std::string cmd =
      "'" + cli + "' " + args + " >'" + capture.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  CmdResult res;
  {
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
  }
  std::error_code ec;
  fs::remove(capture, ec);
  if (rc != -1 && WIFEXITED(rc)) res.status = WEXITSTATUS(rc);
  return res;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(bool(in));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

json load_json(const fs::path& p) { return json::parse(read_file(p)); }

}  // namespace

TEST_CASE("cli rejects bad invocations with exit code 2") {
  REQUIRE_CLI();
  CHECK(run_cli(cli, "").status == 2);
  CHECK(run_cli(cli, "frobnicate").status == 2);
  CHECK(run_cli(cli, "simulate --no-such-flag").status == 2);

  const CmdResult help = run_cli(cli, "--help");
  CHECK(help.status == 0);
  CHECK(help.output.find("simulate") != std::string::npos);
  CHECK(help.output.find("rjmcmc") != std::string::npos);
}

TEST_CASE("simulate writes the artifact set") {
  REQUIRE_CLI();
  TempDir dir("sim");
  const CmdResult r = run_cli(
      cli, "simulate --out '" + dir.str() + "' --n 30 --p 5 --term-sizes 2 --seed 4");
  CAPTURE(r.output);
  REQUIRE(r.status == 0);
  CHECK(fs::exists(dir.path / "dataset.csv"));
  CHECK(fs::exists(dir.path / "truth.json"));
  CHECK(fs::exists(dir.path / "config.json"));
  CHECK(fs::exists(dir.path / "run.log"));

  CHECK(count_lines(read_file(dir.path / "dataset.csv")) == 31);  // header + rows
  const json truth = load_json(dir.path / "truth.json");
  CHECK(truth.at("function").at("num_terms").get<int>() == 1);
  CHECK(!truth.at("rule").get<std::string>().empty());
  const json cfg = load_json(dir.path / "config.json");
  CHECK(cfg.at("seed").get<int>() == 4);
  CHECK(cfg.at("data").at("simulate").at("p").get<int>() == 5);
}

TEST_CASE("simulate without an output directory is a usage error") {
  REQUIRE_CLI();
  const CmdResult r = run_cli(cli, "simulate --n 10 --p 3");
  CHECK(r.status == 2);
  CHECK(r.output.find("output") != std::string::npos);
}

TEST_CASE("fit commands demand exactly one data source") {
  REQUIRE_CLI();
  TempDir dir("src");
  CHECK(run_cli(cli, "fit-single --out '" + dir.str() + "'").status == 2);
  CHECK(run_cli(cli, "fit-single --out '" + dir.str() +
                         "' --csv /no/such/file.csv --iters 10")
            .status == 2);
  CHECK(run_cli(cli, "fit-single --out '" + dir.str() + "' --csv a.csv --mushroom b.data")
            .status == 2);
}

TEST_CASE("malformed or invalid config files are usage errors") {
  REQUIRE_CLI();
  TempDir dir("cfg");
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run_cli(cli, "fit-single --config '" + bad.string() + "' --out '" +
                         dir.str() + "'")
            .status == 2);

  const fs::path weird = dir.path / "weird.json";
  std::ofstream(weird)
      << R"({"prior": {"term_size": {"kind": "banana"}}, "data": {"simulate": {}}})";
  CHECK(run_cli(cli, "fit-single --config '" + weird.string() + "' --out '" +
                         dir.str() + "'")
            .status == 2);
}

TEST_CASE("fit-single produces traces and summaries on a small dataset") {
  REQUIRE_CLI();
  TempDir sim("fs_data");
  REQUIRE(run_cli(cli, "simulate --out '" + sim.str() +
                           "' --n 40 --p 5 --term-sizes 2 --seed 11")
              .status == 0);
  TempDir fit("fs_fit");
  const CmdResult r = run_cli(
      cli, "fit-single --csv '" + (sim.path / "dataset.csv").string() + "' --out '" +
               fit.str() + "' --iters 200 --burnin 100 --chains 2 --seed 7");
  CAPTURE(r.output);
  REQUIRE(r.status == 0);
  CHECK(count_lines(read_file(fit.path / "traces" / "chain_0.csv")) == 101);
  CHECK(count_lines(read_file(fit.path / "traces" / "chain_1.csv")) == 101);
  CHECK(count_lines(read_file(fit.path / "inclusion.csv")) == 6);

  const json summary = load_json(fit.path / "summary.json");
  REQUIRE(summary.at("chains").size() == 2);
  const double pi1 = summary.at("pooled_mean_pi1").get<double>();
  CHECK(pi1 >= 0.0);
  CHECK(pi1 <= 1.0);
}

TEST_CASE("rjmcmc runs narrow data and refuses wide data") {
  REQUIRE_CLI();
  TempDir narrow("rj_narrow");
  REQUIRE(run_cli(cli, "simulate --out '" + narrow.str() +
                           "' --n 50 --p 5 --term-sizes 2 --seed 2")
              .status == 0);
  TempDir fit("rj_fit");
  const CmdResult ok = run_cli(
      cli, "rjmcmc --csv '" + (narrow.path / "dataset.csv").string() + "' --out '" +
               fit.str() + "' --iters 300 --seed 5");
  CAPTURE(ok.output);
  REQUIRE(ok.status == 0);
  CHECK(count_lines(read_file(fit.path / "trace.csv")) == 301);
  const json model = load_json(fit.path / "model.json");
  CHECK(model.at("function").at("num_terms").get<int>() >= 1);
  CHECK(model.at("births").at("proposed").get<int>() >= 0);

  TempDir wide("rj_wide");
  REQUIRE(run_cli(cli, "simulate --out '" + wide.str() +
                           "' --n 30 --p 20 --term-sizes 2 --seed 2")
              .status == 0);
  TempDir fit2("rj_fit2");
  const CmdResult bad = run_cli(
      cli, "rjmcmc --csv '" + (wide.path / "dataset.csv").string() + "' --out '" +
               fit2.str() + "' --iters 10");
  CHECK(bad.status == 2);
  CHECK(bad.output.find("p=20") != std::string::npos);
}

TEST_CASE("anneal writes the model, rules and per-restart traces") {
  REQUIRE_CLI();
  TempDir sim("an_data");
  REQUIRE(run_cli(cli, "simulate --out '" + sim.str() +
                           "' --n 60 --p 6 --term-sizes 2 --seed 13")
              .status == 0);
  TempDir fit("an_fit");
  const CmdResult r = run_cli(
      cli, "anneal --csv '" + (sim.path / "dataset.csv").string() + "' --out '" +
               fit.str() + "' --steps 300 --restarts 2 --m0 1 --seed 3");
  CAPTURE(r.output);
  REQUIRE(r.status == 0);
  CHECK(fs::exists(fit.path / "traces" / "restart_0.csv"));
  CHECK(fs::exists(fit.path / "traces" / "restart_1.csv"));
  CHECK(!read_file(fit.path / "rules.txt").empty());
  const json model = load_json(fit.path / "model.json");
  CHECK(model.at("function").at("num_terms").get<int>() >= 1);
  CHECK(model.at("pi0").get<double>() >= 0.0);
  CHECK(model.at("log_post").is_number());
}

TEST_CASE("crossval writes the grid report") {
  REQUIRE_CLI();
  TempDir sim("cv_data");
  REQUIRE(run_cli(cli, "simulate --out '" + sim.str() +
                           "' --n 80 --p 5 --term-sizes 2 --seed 17")
              .status == 0);
  TempDir fit("cv_fit");
  const fs::path cfg = fit.path / "cv.json";
  std::ofstream(cfg) << R"({"crossval": {"theta_grid": [2], "geom_p_grid": [0.5]}})";
  const CmdResult r = run_cli(
      cli, "crossval --config '" + cfg.string() + "' --csv '" +
               (sim.path / "dataset.csv").string() + "' --out '" + fit.str() +
               "' --reps 2 --steps 150 --restarts 1 --seed 9");
  CAPTURE(r.output);
  REQUIRE(r.status == 0);
  CHECK(count_lines(read_file(fit.path / "report.csv")) == 2);       // header + 1 cell
  CHECK(count_lines(read_file(fit.path / "repetitions.csv")) == 3);  // header + 2 reps
  CHECK(count_lines(read_file(fit.path / "rules.txt")) == 2);
}

TEST_CASE("same seed reruns are byte-identical apart from the log") {
  REQUIRE_CLI();
  // config.json records the output directory, so both runs use the same
  // relative path from different working directories.
  TempDir a("det_a");
  TempDir b("det_b");
  const std::string args = "simulate --out out --n 35 --p 6 --term-sizes 2,1 --seed 21";
  for (const TempDir* d : {&a, &b}) {
    const std::string cmd = "cd '" + d->str() + "' && '" + cli + "' " + args +
                            " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
  }
  for (const char* name : {"dataset.csv", "truth.json", "config.json"})
    CHECK(read_file(a.path / "out" / name) == read_file(b.path / "out" / name));
}
