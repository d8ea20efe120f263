// Copyright 2026 The klbudget Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kCli = KLBUDGET_CLI_PATH;

int run_cli(const std::string& args) {
  const std::string cmd = kCli.string() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path workdir() {
  const auto dir = fs::temp_directory_path() / "klbudget_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_CASE("run exports a full log") {
  const auto dir = workdir();
  write(dir / "run.cfg", "env.name = matrix\ntrain.iterations = 25\n");
  const auto out = dir / "run";
  fs::remove_all(out);
  CHECK(run_cli("run --config " + (dir / "run.cfg").string() + " --seed 3 --out " + out.string()) == 0);
  CHECK(count_lines(out / "kl.csv") == 26);
  CHECK(count_lines(out / "rewards.csv") == 26);
  CHECK(read(out / "config.json").find("\"seed\": 3") != std::string::npos);
}

TEST_CASE("sweep writes the steps summary") {
  const auto dir = workdir();
  write(dir / "sweep.cfg", "env.name = matrix\ntrain.iterations = 150\n");
  const auto out = dir / "sweep";
  fs::remove_all(out);
  CHECK(run_cli("sweep --config " + (dir / "sweep.cfg").string() +
                " --deltas 1e-3,1e-2 --seeds 2 --out " + out.string()) == 0);
  const auto summary = read(out / "steps_vs_delta.csv");
  CHECK(summary.rfind("strategy,delta_total,seed,steps_to_99pct\n", 0) == 0);
  CHECK(count_lines(out / "steps_vs_delta.csv") == 1 + 3 * 2 * 2);
  CHECK(summary.find("NA") != std::string::npos);  // 1e-3 cannot converge in 150 steps
  CHECK(fs::exists(out / "waterfill" / "delta_0.01" / "seed_1" / "policy.csv"));
}

TEST_CASE("compare writes final rewards and medians") {
  const auto dir = workdir();
  write(dir / "cmp.cfg", "env.name = differential\ntrain.iterations = 20\ntrain.eval_episodes = 5\n");
  const auto out = dir / "cmp";
  fs::remove_all(out);
  CHECK(run_cli("compare --config " + (dir / "cmp.cfg").string() + " --seeds 2 --out " +
                out.string()) == 0);
  CHECK(count_lines(out / "final_rewards.csv") == 1 + 3 * 2);
  CHECK(count_lines(out / "medians.csv") == 4);
}

TEST_CASE("surface dump") {
  const auto out = workdir() / "surface.csv";
  CHECK(run_cli("surface --out " + out.string() + " --resolution 11") == 0);
  CHECK(count_lines(out) == 1 + 11 * 11);
}

TEST_CASE("selftest passes") { CHECK(run_cli("selftest") == 0); }

TEST_CASE("exit codes for bad input") {
  const auto dir = workdir();
  write(dir / "bad.cfg", "alloc.delta_total = -1\n");
  CHECK(run_cli("run --config " + (dir / "bad.cfg").string()) == 1);
  write(dir / "unknown.cfg", "alloc.wat = 1\n");
  CHECK(run_cli("run --config " + (dir / "unknown.cfg").string()) == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("sweep --config " + (dir / "unknown.cfg").string()) == 1);
  // A file where the output directory should go is a runtime failure.
  write(dir / "blocker", "x");
  write(dir / "ok.cfg", "train.iterations = 2\n");
  CHECK(run_cli("run --config " + (dir / "ok.cfg").string() + " --out " +
                (dir / "blocker" / "sub").string()) == 2);
}
