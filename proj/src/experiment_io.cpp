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

#include "klbudget/experiment_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "klbudget/error.hpp"

namespace klb {
namespace {

using Json = nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_integer(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// A key's raw value plus where it came from, for error messages.
struct RawValue {
  std::string value;
  std::string where;
};

[[noreturn]] void parse_error(const RawValue& raw, const std::string& what) {
  fail(ErrorKind::kParse, raw.where + ": " + what);
}

double get_double(const RawValue& raw) {
  if (auto v = to_double(raw.value)) return *v;
  parse_error(raw, "expected a number, got '" + raw.value + "'");
}

int get_int(const RawValue& raw) {
  if (auto v = to_integer<int>(raw.value)) return *v;
  parse_error(raw, "expected an integer, got '" + raw.value + "'");
}

std::uint64_t get_u64(const RawValue& raw) {
  if (auto v = to_integer<std::uint64_t>(raw.value)) return *v;
  parse_error(raw, "expected a nonnegative integer, got '" + raw.value + "'");
}

bool get_bool(const RawValue& raw) {
  if (raw.value == "true" || raw.value == "1") return true;
  if (raw.value == "false" || raw.value == "0") return false;
  parse_error(raw, "expected true or false, got '" + raw.value + "'");
}

template <class Enum, std::size_t N>
Enum get_enum(const RawValue& raw, const std::array<Enum, N>& options) {
  for (Enum e : options) {
    if (to_string(e) == raw.value) return e;
  }
  std::string allowed;
  for (Enum e : options) {
    if (!allowed.empty()) allowed += ", ";
    allowed += to_string(e);
  }
  parse_error(raw, "expected one of {" + allowed + "}, got '" + raw.value + "'");
}

constexpr std::array kEnvKinds = {EnvKind::kMatrix, EnvKind::kDifferential};
constexpr std::array kStrategies = {Strategy::kUniform, Strategy::kGreedy,
                                    Strategy::kWaterfill};
constexpr std::array kUtilityModes = {UtilityMode::kMean, UtilityMode::kPositiveMean,
                                      UtilityMode::kAbsMean, UtilityMode::kSurrogate};
constexpr std::array kVariants = {RewardVariant::kLiteralSuffix,
                                  RewardVariant::kPrefixOnes};
constexpr std::array kSolvers = {LambdaSolver::kBisection,
                                 LambdaSolver::kMultiplicative};
constexpr std::array kInits = {LambdaInit::kLarge, LambdaInit::kSmall};

using Setter = std::function<void(RunConfig&, const RawValue&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"env.name", [](RunConfig& c, const RawValue& v) { c.env = get_enum(v, kEnvKinds); }},
      {"env.n_agents", [](RunConfig& c, const RawValue& v) { c.matrix.n_agents = get_int(v); }},
      {"env.reward_variant",
       [](RunConfig& c, const RawValue& v) { c.matrix.reward_variant = get_enum(v, kVariants); }},
      {"env.init_p1", [](RunConfig& c, const RawValue& v) { c.init_p1 = get_double(v); }},
      {"env.init_mean",
       [](RunConfig& c, const RawValue& v) {
         const auto parts = split(v.value, ',');
         if (parts.size() != 2) parse_error(v, "expected two comma-separated means");
         for (std::size_t i = 0; i < 2; ++i) {
           auto d = to_double(parts[i]);
           if (!d) parse_error(v, "expected a number, got '" + std::string(parts[i]) + "'");
           c.init_mean[i] = *d;
         }
       }},
      {"env.sigma", [](RunConfig& c, const RawValue& v) { c.sigma = get_double(v); }},
      {"alloc.strategy",
       [](RunConfig& c, const RawValue& v) { c.strategy = get_enum(v, kStrategies); }},
      {"alloc.delta_total",
       [](RunConfig& c, const RawValue& v) { c.delta_total = get_double(v); }},
      {"alloc.utility_mode",
       [](RunConfig& c, const RawValue& v) { c.utility_mode = get_enum(v, kUtilityModes); }},
      {"alloc.mask_blocked",
       [](RunConfig& c, const RawValue& v) { c.mask_blocked_utility = get_bool(v); }},
      {"alloc.greedy_epsilon",
       [](RunConfig& c, const RawValue& v) { c.greedy_epsilon = get_double(v); }},
      {"alloc.waterfill_tol",
       [](RunConfig& c, const RawValue& v) { c.waterfill.tol = get_double(v); }},
      {"alloc.lambda_solver",
       [](RunConfig& c, const RawValue& v) { c.waterfill.solver = get_enum(v, kSolvers); }},
      {"alloc.lambda_init",
       [](RunConfig& c, const RawValue& v) { c.waterfill.init = get_enum(v, kInits); }},
      {"alloc.lambda_max_iter",
       [](RunConfig& c, const RawValue& v) { c.waterfill.max_iter = get_int(v); }},
      {"alloc.uniform_per_agent",
       [](RunConfig& c, const RawValue& v) { c.uniform_per_agent = get_bool(v); }},
      {"train.iterations", [](RunConfig& c, const RawValue& v) { c.iterations = get_int(v); }},
      {"train.batch_size", [](RunConfig& c, const RawValue& v) { c.batch_size = get_int(v); }},
      {"train.eval_episodes",
       [](RunConfig& c, const RawValue& v) { c.eval_episodes = get_int(v); }},
      {"train.seed", [](RunConfig& c, const RawValue& v) { c.seed = get_u64(v); }},
      {"train.critic_lr", [](RunConfig& c, const RawValue& v) { c.critic_lr = get_double(v); }},
      {"train.critic_init",
       [](RunConfig& c, const RawValue& v) { c.critic_init = get_double(v); }},
      {"train.exact_eval", [](RunConfig& c, const RawValue& v) { c.exact_eval = get_bool(v); }},
      {"train.gamma", [](RunConfig& c, const RawValue& v) { c.gamma = get_double(v); }},
  };
  return table;
}

// Bare keys resolve to their section when exactly one section has them.
std::string canonical_key(const std::string& key, const RawValue& where) {
  if (key.find('.') != std::string::npos) return key;
  std::string match;
  for (const auto& [full, setter] : setters()) {
    if (full.substr(full.find('.') + 1) != key) continue;
    if (!match.empty()) parse_error(where, "ambiguous key '" + key + "'");
    match = full;
  }
  return match.empty() ? key : match;
}

using RawConfig = std::vector<std::pair<std::string, RawValue>>;

RawConfig read_key_values(std::string_view text) {
  RawConfig raw;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      fail(ErrorKind::kParse, where + ": expected 'key = value', got '" +
                                  std::string(line) + "'");
    }
    raw.emplace_back(std::string(trim(line.substr(0, eq))),
                     RawValue{std::string(trim(line.substr(eq + 1))), where});
  }
  return raw;
}

std::string json_scalar(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ",";
      out += json_scalar(e, key);
    }
    return out;
  }
  fail(ErrorKind::kParse, "key '" + key + "': unsupported JSON value");
}

RawConfig read_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kParse, "JSON config must be an object");
  RawConfig raw;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) {
      for (const auto& [sub, inner] : value.items()) {
        const std::string full = key + "." + sub;
        raw.emplace_back(full, RawValue{json_scalar(inner, full), "key '" + full + "'"});
      }
    } else {
      raw.emplace_back(key, RawValue{json_scalar(value, key), "key '" + key + "'"});
    }
  }
  return raw;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kExport, "cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) fail(ErrorKind::kExport, "failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kInvalidHistory, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvData read_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  CsvData data;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (data.header.empty()) {
      for (auto f : fields) data.header.emplace_back(trim(f));
      continue;
    }
    if (fields.size() != data.header.size()) {
      fail(ErrorKind::kInvalidHistory, path.string() + " line " +
                                           std::to_string(line_no) +
                                           ": wrong field count");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) {
      auto v = to_double(f);
      if (!v) {
        fail(ErrorKind::kInvalidHistory, path.string() + " line " +
                                             std::to_string(line_no) + ": bad number '" +
                                             std::string(f) + "'");
      }
      row.push_back(*v);
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::vector<std::string> numbered(const std::string& prefix, int m) {
  std::vector<std::string> out;
  for (int i = 1; i <= m; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void expect_header(const CsvData& data, const std::vector<std::string>& expected,
                   const std::filesystem::path& path) {
  if (data.header != expected) {
    std::string want;
    for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
    fail(ErrorKind::kInvalidHistory, path.string() + ": expected header " + want);
  }
}

std::string table_to_string(const MetricTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view to_string(EnvKind env) {
  return env == EnvKind::kMatrix ? "matrix" : "differential";
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kUniform: return "uniform";
    case Strategy::kGreedy: return "greedy";
    case Strategy::kWaterfill: return "waterfill";
  }
  return "unknown";
}

std::string_view to_string(UtilityMode mode) {
  switch (mode) {
    case UtilityMode::kMean: return "mean";
    case UtilityMode::kPositiveMean: return "positive_mean";
    case UtilityMode::kAbsMean: return "abs_mean";
    case UtilityMode::kSurrogate: return "surrogate";
  }
  return "unknown";
}

std::string_view to_string(RewardVariant variant) {
  return variant == RewardVariant::kLiteralSuffix ? "literal_suffix" : "prefix_ones";
}

std::string_view to_string(LambdaSolver solver) {
  return solver == LambdaSolver::kBisection ? "bisection" : "multiplicative";
}

std::string_view to_string(LambdaInit init) {
  return init == LambdaInit::kLarge ? "large" : "small";
}

Strategy parse_strategy(std::string_view s) {
  return get_enum(RawValue{std::string(s), "strategy"}, kStrategies);
}

RunConfig parse_config(std::string_view text, EnvKind default_env) {
  const bool is_json = !trim(text).empty() && trim(text).front() == '{';
  RawConfig raw = is_json ? read_json(text) : read_key_values(text);
  for (auto& [key, value] : raw) key = canonical_key(key, value);

  EnvKind env = default_env;
  std::map<std::string, std::string> seen;
  for (const auto& [key, value] : raw) {
    if (!setters().contains(key)) {
      fail(ErrorKind::kParse, value.where + ": unknown key '" + key + "'");
    }
    if (auto [it, inserted] = seen.emplace(key, value.where); !inserted) {
      fail(ErrorKind::kParse, value.where + ": duplicate key '" + key + "' (first at " +
                                  it->second + ")");
    }
    if (key == "env.name") env = get_enum(value, kEnvKinds);
  }

  RunConfig config = default_config(env);
  for (const auto& [key, value] : raw) setters().at(key)(config, value);

  if (!(config.delta_total > 0.0)) {
    const auto it = std::find_if(raw.begin(), raw.end(),
                                 [](const auto& kv) { return kv.first == "alloc.delta_total"; });
    fail(ErrorKind::kParse, (it != raw.end() ? it->second.where : std::string("defaults")) +
                                ": alloc.delta_total must be positive");
  }
  try {
    config.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kParse, std::string("constraint violation: ") + e.what());
  }
  return config;
}

RunConfig load_config_file(const std::filesystem::path& path, EnvKind default_env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kParse, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), default_env);
  } catch (const Error& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

std::string config_to_json(const RunConfig& c) {
  Json doc;
  doc["env"] = {
      {"name", to_string(c.env)},
      {"n_agents", c.matrix.n_agents},
      {"reward_variant", to_string(c.matrix.reward_variant)},
      {"init_p1", c.init_p1},
      {"init_mean", {c.init_mean[0], c.init_mean[1]}},
      {"sigma", c.sigma},
  };
  doc["alloc"] = {
      {"strategy", to_string(c.strategy)},
      {"delta_total", c.delta_total},
      {"utility_mode", to_string(c.utility_mode)},
      {"mask_blocked", c.mask_blocked_utility},
      {"greedy_epsilon", c.greedy_epsilon},
      {"waterfill_tol", c.waterfill.tol},
      {"lambda_solver", to_string(c.waterfill.solver)},
      {"lambda_init", to_string(c.waterfill.init)},
      {"lambda_max_iter", c.waterfill.max_iter},
      {"uniform_per_agent", c.uniform_per_agent},
  };
  doc["train"] = {
      {"iterations", c.iterations},
      {"batch_size", c.batch_size},
      {"eval_episodes", c.eval_episodes},
      {"seed", c.seed},
      {"critic_lr", c.critic_lr},
      {"critic_init", c.critic_init},
      {"exact_eval", c.exact_eval},
      {"gamma", c.gamma},
  };
  return doc.dump(2) + "\n";
}

std::optional<int> steps_to_threshold(std::span<const double> eval_rewards,
                                      double fraction, double max_reward) {
  if (eval_rewards.empty()) fail(ErrorKind::kInvalidHistory, "history is empty");
  if (!(fraction > 0.0 && fraction <= 1.0) && fraction != 0.0) {
    fail(ErrorKind::kInvalidParameter, "fraction must lie in (0, 1]");
  }
  const double threshold = fraction * max_reward;
  for (std::size_t i = 0; i < eval_rewards.size(); ++i) {
    if (eval_rewards[i] >= threshold) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::optional<int> steps_to_threshold(const RunHistory& history, double fraction,
                                      double max_reward) {
  if (history.records.empty()) fail(ErrorKind::kInvalidHistory, "history is empty");
  std::vector<double> rewards;
  rewards.reserve(history.records.size());
  for (const auto& r : history.records) rewards.push_back(r.eval_reward);
  auto idx = steps_to_threshold(rewards, fraction, max_reward);
  if (!idx) return std::nullopt;
  return history.records[static_cast<std::size_t>(*idx - 1)].iteration;
}

void MetricTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    fail(ErrorKind::kInputShape, "row has " + std::to_string(row.size()) +
                                     " fields, table has " +
                                     std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

MetricTable reward_curve(const RunHistory& history) {
  MetricTable t{MetricKind::kRewardCurve, {"iteration", "eval_reward", "critic_value"}, {}};
  for (const auto& r : history.records) {
    t.add_row({double(r.iteration), r.eval_reward, r.critic_value});
  }
  return t;
}

MetricTable kl_heatmap(const RunHistory& history) {
  const int m = history.config.agents();
  MetricTable t{MetricKind::kKlHeatmap, {"iteration"}, {}};
  for (auto& c : numbered("kl_", m)) t.columns.push_back(c);
  for (const auto& r : history.records) {
    std::vector<double> row{double(r.iteration)};
    row.insert(row.end(), r.realized_kl.begin(), r.realized_kl.end());
    t.add_row(std::move(row));
  }
  return t;
}

MetricTable trajectory(const RunHistory& history) {
  const int m = history.config.agents();
  const bool matrix = history.config.env == EnvKind::kMatrix;
  MetricTable t{MetricKind::kTrajectory, {"iteration"}, {}};
  for (auto& c : numbered(matrix ? "p1_" : "mu_", m)) t.columns.push_back(c);
  for (const auto& r : history.records) {
    std::vector<double> row{double(r.iteration)};
    for (const auto& p : r.policy_snapshot) row.push_back(primary_parameter(p));
    t.add_row(std::move(row));
  }
  return t;
}

MetricTable adv_kl_pairs(const RunHistory& history) {
  MetricTable t{MetricKind::kAdvKlPairs,
                {"iteration", "agent", "normalized_utility", "realized_kl"},
                {}};
  for (const auto& r : history.records) {
    if (r.utilities.size() != r.realized_kl.size()) {
      fail(ErrorKind::kInvalidHistory, "record is missing utilities");
    }
    double scale = 0.0;
    for (double u : r.utilities) scale = std::max(scale, std::abs(u));
    for (std::size_t i = 0; i < r.utilities.size(); ++i) {
      const double norm = scale > 0.0 ? r.utilities[i] / scale : 0.0;
      t.add_row({double(r.iteration), double(i + 1), norm, r.realized_kl[i]});
    }
  }
  return t;
}

void write_csv(std::ostream& out, const MetricTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_double(row[i]);
    }
    out << '\n';
  }
}

void export_run_csv(const RunHistory& history, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    fail(ErrorKind::kExport, "cannot create " + directory.string() + ": " + ec.message());
  }
  const int m = history.config.agents();

  MetricTable kl{MetricKind::kKlHeatmap, {"iteration"}, {}};
  for (const char* prefix : {"delta_", "realized_kl_", "utility_"}) {
    for (auto& c : numbered(prefix, m)) kl.columns.push_back(c);
  }
  for (const auto& r : history.records) {
    std::vector<double> row{double(r.iteration)};
    row.insert(row.end(), r.allocation.deltas.begin(), r.allocation.deltas.end());
    row.insert(row.end(), r.realized_kl.begin(), r.realized_kl.end());
    row.insert(row.end(), r.utilities.begin(), r.utilities.end());
    kl.add_row(std::move(row));
  }

  write_file(directory / "rewards.csv", table_to_string(reward_curve(history)));
  write_file(directory / "kl.csv", table_to_string(kl));
  write_file(directory / "policy.csv", table_to_string(trajectory(history)));
  write_file(directory / "config.json", config_to_json(history.config));
}

RunHistory load_run_csv(const std::filesystem::path& directory) {
  RunHistory history;
  try {
    history.config = parse_config(read_file(directory / "config.json"));
  } catch (const Error& e) {
    fail(ErrorKind::kInvalidHistory, (directory / "config.json").string() + ": " + e.what());
  }
  const RunConfig& cfg = history.config;
  const int m = cfg.agents();
  const bool matrix = cfg.env == EnvKind::kMatrix;

  const auto rewards = read_csv(directory / "rewards.csv");
  expect_header(rewards, {"iteration", "eval_reward", "critic_value"},
                directory / "rewards.csv");
  const auto kl = read_csv(directory / "kl.csv");
  std::vector<std::string> kl_header{"iteration"};
  for (const char* prefix : {"delta_", "realized_kl_", "utility_"}) {
    for (auto& c : numbered(prefix, m)) kl_header.push_back(c);
  }
  expect_header(kl, kl_header, directory / "kl.csv");
  const auto policy = read_csv(directory / "policy.csv");
  std::vector<std::string> policy_header{"iteration"};
  for (auto& c : numbered(matrix ? "p1_" : "mu_", m)) policy_header.push_back(c);
  expect_header(policy, policy_header, directory / "policy.csv");

  if (kl.rows.size() != rewards.rows.size() || policy.rows.size() != rewards.rows.size()) {
    fail(ErrorKind::kInvalidHistory, directory.string() + ": CSV files disagree on row count");
  }

  for (std::size_t k = 0; k < rewards.rows.size(); ++k) {
    IterationRecord r;
    r.iteration = static_cast<int>(rewards.rows[k][0]);
    r.eval_reward = rewards.rows[k][1];
    r.critic_value = rewards.rows[k][2];
    const auto& kr = kl.rows[k];
    r.allocation.deltas.assign(kr.begin() + 1, kr.begin() + 1 + m);
    r.realized_kl.assign(kr.begin() + 1 + m, kr.begin() + 1 + 2 * m);
    r.utilities.assign(kr.begin() + 1 + 2 * m, kr.begin() + 1 + 3 * m);
    r.surrogate_gains.assign(static_cast<std::size_t>(m), 0.0);
    r.allocation.total_budget = cfg.delta_total;
    r.allocation.strategy = cfg.strategy;
    for (int i = 0; i < m; ++i) {
      if (r.allocation.deltas[i] > 0.0) r.allocation.order.push_back(i);
    }
    for (int i = 0; i < m; ++i) {
      const double v = policy.rows[k][1 + i];
      if (matrix) {
        r.policy_snapshot.push_back(Bernoulli{v});
      } else {
        r.policy_snapshot.push_back(Gaussian1D{v, cfg.sigma});
      }
    }
    history.records.push_back(std::move(r));
  }
  return history;
}

}  // namespace klb
