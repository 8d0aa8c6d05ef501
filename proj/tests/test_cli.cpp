#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "noiselab/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = noiselab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path source_dir() { return fs::path(NOISELAB_SOURCE_DIR); }

class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_(fs::temp_directory_path() / name) {
    fs::remove(path_);
  }
  ~TempFile() { fs::remove(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("qmatrix optimal k=3 matches the pinned golden output") {
  const auto result = run_cli({"qmatrix", "--kind", "optimal", "--k", "3"});
  CHECK(result.exit_code == 0);
  CHECK(result.out ==
        read_file(source_dir() / "tests/golden/qmatrix_optimal_k3.json"));

  const auto j = nlohmann::json::parse(result.out);
  CHECK(j.at("det").get<double>() == 0.0625);
  CHECK(j.at("delta_s").get<double>() ==
        doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-12));
  CHECK(j.at("report").at("overall").get<bool>());
}

TEST_CASE("entropy: zero gaussian noise reports a zero change") {
  const std::string ensemble =
      (source_dir() / "fixtures/ensemble_k3.json").string();
  const auto result = run_cli({"entropy", "--noise", "gaussian", "--sigma2",
                               "0", "--ensemble", ensemble});
  CHECK(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.out);
  CHECK(j.at("delta_s").get<double>() == 0.0);
  CHECK(j.at("classification").get<std::string>() == "harmful");
}

TEST_CASE("entropy: csv format emits one labeled row") {
  const auto result =
      run_cli({"--format", "csv", "entropy", "--noise", "salt_pepper",
               "--alpha", "0.5"});
  CHECK(result.exit_code == 0);
  CHECK(result.out.rfind("delta_s,classification\n", 0) == 0);
  CHECK(result.out.find("harmful") != std::string::npos);

  // global flags are accepted after the subcommand as well
  const auto trailing = run_cli({"entropy", "--noise", "salt_pepper",
                                 "--alpha", "0.5", "--format", "csv"});
  CHECK(trailing.exit_code == 0);
  CHECK(trailing.out == result.out);
}

TEST_CASE("entropy: sweep emits the documented CSV schema") {
  const auto result = run_cli({"entropy", "--noise", "salt_pepper", "--sweep",
                               "0:0.9:10"});
  CHECK(result.exit_code == 0);
  std::istringstream lines(result.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "noise_param,delta_s");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 10);
}

TEST_CASE("entropy: a singular quality matrix is a numerical failure") {
  const auto result = run_cli({"entropy", "--noise", "linear", "--qkind",
                               "backward", "--k", "3"});
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("singular_matrix") != std::string::npos);
}

TEST_CASE("qmatrix sweep marks the singular point") {
  const auto result = run_cli({"qmatrix", "--kind", "circular", "--k", "4",
                               "--sweep", "0:0.5:6"});
  CHECK(result.exit_code == 0);
  std::istringstream lines(result.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "alpha,det,delta_s,valid");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 6);
  CHECK(rows.back() == "0.5,0,,0");  // alpha=0.5: singular, invalid
}

TEST_CASE("oracle runs are byte-identical per seed") {
  const auto a = run_cli({"--seed", "1", "oracle", "--suite", "dense"});
  const auto b = run_cli({"--seed", "1", "oracle", "--suite", "dense"});
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("check,cases,max_error,threshold,pass\n", 0) == 0);

  const auto c = run_cli({"--seed", "2", "oracle", "--suite", "dense"});
  CHECK(c.exit_code == 0);
  CHECK(a.out != c.out);
}

TEST_CASE("oracle emits JSON when asked") {
  const auto result = run_cli({"--seed", "1", "--format", "json", "oracle",
                               "--suite", "saltpepper"});
  CHECK(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.out);
  REQUIRE(j.is_array());
  CHECK(j.at(0).at("pass").get<bool>());
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli({"entropy", "--no-such-flag"}).exit_code == 1);
  CHECK(run_cli({"train"}).exit_code == 1);          // missing --config
  CHECK(run_cli({}).exit_code == 1);                 // missing subcommand
  CHECK(run_cli({"--help"}).exit_code == 0);
}

TEST_CASE("train: config file in, record JSON out, CSV row appended") {
  TempFile config_file("noiselab_test_config.json");
  TempFile csv_file("noiselab_test_runs.csv");
  {
    std::ofstream cfg(config_file.path());
    cfg << R"({
      "epochs": 4,
      "batch_size": 8,
      "learning_rate": 0.05,
      "momentum": 0.9,
      "seed": 3,
      "dataset": {"classes": 2, "dim": 2, "n_per_class": 20, "spread": 0.3},
      "hidden": [6],
      "noise": {"kind": "salt_pepper", "alpha": 0.3}
    })";
  }

  const auto result = run_cli({"train", "--config",
                               config_file.path().string(), "--csv",
                               csv_file.path().string()});
  CHECK(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.out);
  CHECK(j.at("epochs").size() == 4);
  const double acc = j.at("final_test_accuracy").get<double>();
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  CHECK_FALSE(j.contains("wall_time_seconds"));

  const std::string csv = read_file(csv_file.path());
  CHECK(csv.rfind("seed,noise_kind,param,layer,final_test_accuracy\n", 0) ==
        0);
  CHECK(csv.find("salt_pepper") != std::string::npos);

  // identical invocation, identical record bytes
  const auto again = run_cli({"train", "--config",
                              config_file.path().string()});
  CHECK(again.out == result.out);

  // --timings adds the one non-deterministic field
  const auto timed = run_cli({"train", "--config",
                              config_file.path().string(), "--timings"});
  CHECK(nlohmann::json::parse(timed.out).contains("wall_time_seconds"));

  // --seed overrides the config seed
  const auto reseeded = run_cli({"--seed", "99", "train", "--config",
                                 config_file.path().string()});
  CHECK(nlohmann::json::parse(reseeded.out).at("seed").get<std::uint64_t>() ==
        99);
}

TEST_CASE("sweep: grid CSV is deterministic") {
  const std::vector<std::string> args = {
      "--seed", "4",    "sweep",         "--seeds", "2",  "--epochs", "2",
      "--batch", "8",   "--n-per-class", "10",      "--classes", "2",
      "--dim",   "2",   "--spread",      "0.3",     "--hidden",  "4"};
  const auto a = run_cli(args);
  CHECK(a.exit_code == 0);
  std::istringstream lines(a.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "noise_kind,param,layer,seed,final_test_accuracy");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 8);  // 4 noise settings x 2 seeds
  CHECK(a.err.find("mean final test accuracy") != std::string::npos);

  const auto b = run_cli(args);
  CHECK(a.out == b.out);
}

TEST_CASE("--out writes the payload to a file") {
  TempFile out_file("noiselab_test_out.json");
  const auto result = run_cli({"--out", out_file.path().string(), "qmatrix",
                               "--kind", "optimal", "--k", "2"});
  CHECK(result.exit_code == 0);
  CHECK(result.out.empty());
  const auto j = nlohmann::json::parse(read_file(out_file.path()));
  CHECK(j.at("k").get<int>() == 2);
}
