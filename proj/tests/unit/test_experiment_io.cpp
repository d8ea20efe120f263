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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "klbudget/experiment_io.hpp"
#include "test_util.hpp"

using namespace klb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("klbudget_io_" + name);
  fs::remove_all(dir);
  return dir;
}

RunHistory small_history(EnvKind env, int iterations) {
  RunConfig c = default_config(env);
  c.iterations = iterations;
  c.eval_episodes = 10;
  c.seed = 3;
  return train(c);
}

}  // namespace

TEST_CASE("empty config yields environment defaults") {
  const auto m = parse_config("", EnvKind::kMatrix);
  CHECK(m.env == EnvKind::kMatrix);
  CHECK(m.iterations == 1000);
  CHECK(m.batch_size == 20);
  CHECK(m.init_p1 == 0.01);
  const auto d = parse_config("", EnvKind::kDifferential);
  CHECK(d.iterations == 4000);
  CHECK(d.sigma == 1.15);
  CHECK(d.init_mean == std::array<double, 2>{1.0, 1.0});
  CHECK(d.critic_lr == 0.2);
}

TEST_CASE("key-value config") {
  const auto c = parse_config(
      "# comment\n"
      "env.name = differential\n"
      "env.init_mean = 2, 3.5   # trailing\n"
      "alloc.strategy = greedy\n"
      "alloc.delta_total = 0.25\n"
      "train.seed = 12\n"
      "train.exact_eval = false\n");
  CHECK(c.env == EnvKind::kDifferential);
  CHECK(c.iterations == 4000);
  CHECK(c.init_mean == std::array<double, 2>{2.0, 3.5});
  CHECK(c.strategy == Strategy::kGreedy);
  CHECK(c.delta_total == 0.25);
  CHECK(c.seed == 12);
  CHECK_FALSE(c.exact_eval);
}

TEST_CASE("config errors") {
  CHECK_ERROR_KIND(parse_config("delta_total = -1"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_config("alloc.delta_total = 0"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_config("train.iterations = ten"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_config("alloc.strategy = best"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_config("train.seed = 1\ntrain.seed = 2"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_config("no equals sign"), ErrorKind::kParse);
  try {
    parse_config("train.seed = 1\nalloc.colour = red\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("alloc.colour") != std::string::npos);
  }
}

TEST_CASE("bare keys resolve to their section") {
  const auto c = parse_config("delta_total = 0.5\niterations = 7");
  CHECK(c.delta_total == 0.5);
  CHECK(c.iterations == 7);
}

TEST_CASE("JSON config, nested and flat") {
  const auto nested = parse_config(
      R"({"env": {"name": "matrix", "n_agents": 6, "reward_variant": "prefix_ones"},
          "alloc": {"strategy": "uniform", "delta_total": 0.001},
          "train": {"seed": 4, "exact_eval": true}})");
  CHECK(nested.matrix.n_agents == 6);
  CHECK(nested.matrix.reward_variant == RewardVariant::kPrefixOnes);
  CHECK(nested.strategy == Strategy::kUniform);
  CHECK(nested.seed == 4);
  const auto flat = parse_config(R"({"env.n_agents": 6, "env.init_mean": [1, 2]})");
  CHECK(flat.matrix.n_agents == 6);
  CHECK(flat.init_mean == std::array<double, 2>{1.0, 2.0});
  CHECK_ERROR_KIND(parse_config(R"({"env": {"bogus": 1}})"), ErrorKind::kParse);
  CHECK_ERROR_KIND(parse_config("{not json"), ErrorKind::kParse);
}

TEST_CASE("config echo round-trips") {
  auto c = default_config(EnvKind::kDifferential);
  c.delta_total = 0.1234567890123;
  c.seed = 99;
  c.waterfill.solver = LambdaSolver::kMultiplicative;
  const auto text = config_to_json(c);
  CHECK(config_to_json(parse_config(text)) == text);
}

TEST_CASE("steps to threshold") {
  const std::vector<double> rewards{1.0, 1.2, 1.49, 1.5};
  CHECK(steps_to_threshold(rewards, 0.99, 1.5) == 3);
  const std::vector<double> low{1.0, 1.1};
  CHECK_FALSE(steps_to_threshold(low, 0.99, 1.5).has_value());
  CHECK(steps_to_threshold(rewards, 0.0, 1.5) == 1);
  CHECK_ERROR_KIND(steps_to_threshold(std::vector<double>{}, 0.99, 1.5),
                   ErrorKind::kInvalidHistory);
  int prev = 0;
  for (int k = 1; k <= 100; ++k) {
    const auto s = steps_to_threshold(rewards, k / 100.0, 1.5);
    REQUIRE(s.has_value());
    CHECK(*s >= prev);
    prev = *s;
  }
}

TEST_CASE("advantage and KL pairs") {
  RunHistory h;
  h.config = default_config(EnvKind::kMatrix);
  h.config.matrix.n_agents = 2;
  IterationRecord r;
  r.iteration = 1;
  r.utilities = {0.2, 0.1};
  r.realized_kl = {3e-4, 1e-4};
  h.records.push_back(r);
  r.iteration = 2;
  r.utilities = {0.0, 0.0};
  h.records.push_back(r);
  const auto t = adv_kl_pairs(h);
  CHECK(t.columns == std::vector<std::string>{"iteration", "agent", "normalized_utility", "realized_kl"});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0] == std::vector<double>{1, 1, 1.0, 3e-4});
  CHECK(t.rows[1] == std::vector<double>{1, 2, 0.5, 1e-4});
  CHECK(t.rows[2][2] == 0.0);
}

TEST_CASE("normalized utilities stay in [-1, 1]") {
  const auto h = small_history(EnvKind::kDifferential, 50);
  for (const auto& row : adv_kl_pairs(h).rows) {
    CHECK(row[2] >= -1.0);
    CHECK(row[2] <= 1.0);
  }
  const auto heat = kl_heatmap(h);
  CHECK(heat.columns.size() == 3);
  CHECK(heat.rows.size() == 50);
}

TEST_CASE("metric tables reject ragged rows") {
  MetricTable t{MetricKind::kRewardCurve, {"a", "b"}, {}};
  CHECK_ERROR_KIND(t.add_row({1.0}), ErrorKind::kInputShape);
}

TEST_CASE("CSV export round-trip") {
  for (auto env : {EnvKind::kMatrix, EnvKind::kDifferential}) {
    const auto h = small_history(env, 40);
    const auto a = scratch("a"), b = scratch("b");
    export_run_csv(h, a);
    for (const char* f : {"rewards.csv", "kl.csv", "policy.csv", "config.json"}) {
      CHECK(fs::exists(a / f));
    }
    std::ifstream kl(a / "kl.csv");
    std::string header;
    std::getline(kl, header);
    const int m = h.config.agents();
    CHECK(header.rfind("iteration,delta_1", 0) == 0);
    int lines = 1;
    for (std::string line; std::getline(kl, line);) ++lines;
    CHECK(lines == 41);
    (void)m;

    const auto loaded = load_run_csv(a);
    export_run_csv(loaded, b);
    for (const char* f : {"rewards.csv", "kl.csv", "policy.csv", "config.json"}) {
      CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(steps_to_threshold(loaded) == steps_to_threshold(h));
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("export failures name the path") {
  const auto dir = scratch("blocked");
  fs::create_directories(dir);
  { std::ofstream(dir / "file") << "x"; }
  try {
    export_run_csv(small_history(EnvKind::kMatrix, 2), dir / "file" / "sub");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kExport);
    CHECK(std::string(e.what()).find("file") != std::string::npos);
  }
  CHECK_ERROR_KIND(load_run_csv(dir / "missing"), ErrorKind::kInvalidHistory);
  fs::remove_all(dir);
}
