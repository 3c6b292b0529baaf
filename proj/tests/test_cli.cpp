#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "v2s/events.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "v2s_cli_test";

int run_cli(const std::string& args, const std::string& stdout_file = "out.txt") {
  const std::string cmd = std::string("\"") + V2S_BINARY + "\" " + args + " > \"" + (kWork / stdout_file).string() +
                          "\" 2> \"" + (kWork / "err.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string output(const std::string& name = "out.txt") { return v2s::read_text_file(kWork / name); }

struct Workdir {
  Workdir() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  ~Workdir() { fs::remove_all(kWork); }
};

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  Workdir w;
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("calibrate") == 2);
  CHECK(run_cli("calibrate --stream " + (kWork / "missing.csv").string()) == 2);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("calibrate prints the hot pixel") {
  Workdir w;
  v2s::write_text_file(kWork / "s.csv", "t_us,x,y,p\n0,5,5,1\n10,3,4,1\n20,3,4,0\n30,5,5,0\n40,3,4,1\n");
  REQUIRE(run_cli("calibrate --stream " + (kWork / "s.csv").string()) == 0);
  CHECK(output() == "3,4\n");

  v2s::write_text_file(kWork / "bad.csv", "t_us,x,y,p\n10,1,1,1\n5,1,1,1\n");
  CHECK(run_cli("calibrate --stream " + (kWork / "bad.csv").string()) == 2);
  CHECK(output("err.txt").find("NonMonotonicTimestamp") != std::string::npos);
}

TEST_CASE("featurize writes one row per window") {
  Workdir w;
  v2s::write_text_file(kWork / "s.csv", "t_us,x,y,p\n0,1,1,1\n5,1,1,0\n12,1,1,1\n25,2,2,1\n39,1,1,0\n");
  REQUIRE(run_cli("featurize --stream " + (kWork / "s.csv").string() + " --pixel 1,1 --bin-ms 0.01 --bins 2 --out " +
              (kWork / "f.csv").string()) == 0);
  CHECK(output("f.csv") ==
        "label,bin_width_us,n_bins,on_0,on_1,off_0,off_1\n"
        ",10,2,1,1,1,0\n"
        ",10,2,0,0,0,1\n");
}

TEST_CASE("synth, train and eval agree") {
  Workdir w;
  const auto data = (kWork / "data").string();
  REQUIRE(run_cli("synth --trials 2 --duration-s 2 --seed 3 --out " + data) == 0);
  CHECK(fs::exists(kWork / "data" / "manifest.json"));
  v2s::write_text_file(kWork / "evo.json",
                       R"({"population_size": 8, "generations": 2, "elitism_count": 1, "master_seed": 5})");
  const auto run = (kWork / "run").string();
  REQUIRE(run_cli("train --quiet --data " + data + " --bins 10 --config " + (kWork / "evo.json").string() + " --out " +
              run) == 0);
  const auto train_out = output();
  CHECK(train_out.find("latency_ms 500") != std::string::npos);
  CHECK(fs::exists(kWork / "run" / "best_network.json"));
  REQUIRE(run_cli("eval --network " + (kWork / "run" / "best_network.json").string() + " --data " + data) == 0);
  CHECK(output().find("macro-F1 ") == 0);
}
