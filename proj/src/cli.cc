// Copyright 2026 The rutk Authors
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

#include "rutk/cli.h"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rutk/error.h"
#include "rutk/report.h"
#include "rutk/simulate.h"
#include "rutk/synth_baseline.h"

namespace rutk {

namespace fs = std::filesystem;

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void ConfigError(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kConfig, "config." + field + ": " + what);
}

std::string Resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base.empty()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

std::string GetString(const ojson& doc, const char* key, bool required) {
  if (!doc.contains(key)) {
    if (required) ConfigError(key, "missing");
    return "";
  }
  if (!doc[key].is_string()) ConfigError(key, "expected a string");
  return doc[key].get<std::string>();
}

bool GetBool(const ojson& doc, const char* key, bool fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_boolean()) ConfigError(key, "expected true or false");
  return doc[key].get<bool>();
}

int GetInt(const ojson& doc, const char* key, int fallback, int min_value) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number_integer()) ConfigError(key, "expected an integer");
  const int64_t v = doc[key].get<int64_t>();
  if (v < min_value || v > 1'000'000'000) {
    ConfigError(key, "must be at least " + std::to_string(min_value));
  }
  return static_cast<int>(v);
}

void WriteFile(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << bytes;
}

std::shared_ptr<const Schema> LoadSchemaShared(const std::string& path) {
  return std::make_shared<const Schema>(LoadSchemaFile(path));
}

}  // namespace

RunConfig ParseRunConfig(const std::string& text, const std::string& base_dir) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "config: expected an object");
  RunConfig cfg;
  cfg.original = Resolve(base_dir, GetString(doc, "original", true));
  cfg.schema = Resolve(base_dir, GetString(doc, "schema", true));
  cfg.risk = Resolve(base_dir, GetString(doc, "risk", false));
  if (doc.contains("rules")) cfg.rules = Resolve(base_dir, GetString(doc, "rules", true));
  if (doc.contains("output_dir")) {
    cfg.output_dir = Resolve(base_dir, GetString(doc, "output_dir", true));
  } else {
    cfg.output_dir = base_dir.empty() ? "." : base_dir;
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      ConfigError("seed", "expected a non-negative integer");
    }
    if (doc["seed"].is_number_integer() && doc["seed"].get<int64_t>() < 0) {
      ConfigError("seed", "expected a non-negative integer");
    }
    cfg.seed = doc["seed"].get<uint64_t>();
  }
  if (doc.contains("synthetic")) {
    if (!doc["synthetic"].is_array()) ConfigError("synthetic", "expected a list");
    const ojson& list = doc["synthetic"];
    for (size_t i = 0; i < list.size(); ++i) {
      const std::string field = "synthetic[" + std::to_string(i) + "]";
      if (!list[i].is_object()) ConfigError(field, "expected an object");
      SyntheticEntry e;
      if (!list[i].contains("label") || !list[i]["label"].is_string() ||
          list[i]["label"].get<std::string>().empty()) {
        ConfigError(field + ".label", "expected a nonempty string");
      }
      if (!list[i].contains("path") || !list[i]["path"].is_string()) {
        ConfigError(field + ".path", "expected a string");
      }
      e.label = list[i]["label"].get<std::string>();
      e.path = Resolve(base_dir, list[i]["path"].get<std::string>());
      for (const SyntheticEntry& prior : cfg.synthetic) {
        if (prior.label == e.label) ConfigError(field + ".label", "duplicate label " + e.label);
      }
      cfg.synthetic.push_back(std::move(e));
    }
  }
  cfg.cio_floor_at_zero = GetBool(doc, "cio_floor_at_zero", false);
  cfg.include_original_point = GetBool(doc, "include_original_point", true);
  cfg.bin_width = GetInt(doc, "bin_width", 5, 1);
  cfg.min_leaf = GetInt(doc, "min_leaf", 5, 1);
  cfg.max_depth = GetInt(doc, "max_depth", 30, 1);
  if (doc.contains("order_policy")) {
    cfg.order_policy = GetString(doc, "order_policy", true);
    if (cfg.order_policy != "category_count" && cfg.order_policy != "as_given") {
      ConfigError("order_policy", "expected \"category_count\" or \"as_given\"");
    }
  }
  if (doc.contains("first_variable")) {
    cfg.first_variable = GetString(doc, "first_variable", true);
  }
  cfg.timestamp = GetString(doc, "timestamp", false);
  cfg.echo = doc.dump();
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), fs::path(path).parent_path().string());
}

int CmdEvaluate(const std::string& config_path, int jobs, std::ostream& out,
                std::ostream& err) {
  EvaluationReport report;
  RunConfig cfg;
  try {
    cfg = LoadRunConfig(config_path);
    if (cfg.risk.empty()) ConfigError("risk", "missing");
    if (cfg.synthetic.empty()) ConfigError("synthetic", "no synthetic datasets listed");
    auto schema = LoadSchemaShared(cfg.schema);
    const Dataset orig = LoadCsv(cfg.original, schema);
    const RiskConfig risk = LoadRiskConfigFile(cfg.risk);

    std::vector<SubjectInput> subjects;
    for (const SyntheticEntry& e : cfg.synthetic) {
      SubjectInput in;
      in.label = e.label;
      try {
        in.data = std::make_shared<const Dataset>(LoadCsv(e.path, schema));
      } catch (const std::exception& ex) {
        in.load_error = e.path + ": " + ex.what();
      }
      subjects.push_back(std::move(in));
    }

    UtilityOptions uopts;
    uopts.bins.width = cfg.bin_width;
    uopts.cio.floor_at_zero = cfg.cio_floor_at_zero;
    report = BuildReport(orig, subjects, risk, uopts, jobs);
    report.config_echo = cfg.echo;
    report.timestamp = cfg.timestamp;

    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    WriteFile(dir / "report.json", ReportToJson(report));
    WriteFile(dir / "tcap.csv", TcapCsv(report));
    WriteFile(dir / "utility.csv", UtilityCsv(report));
    WriteFile(dir / "rumap.csv",
              EmitRuMap(report, cfg.include_original_point, RuMapFormat::kCsv));
    WriteFile(dir / "rumap.svg",
              EmitRuMap(report, cfg.include_original_point, RuMapFormat::kSvg));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  for (const SubjectResult& s : report.subjects) {
    if (s.ok) {
      out << s.label << ": utility " << FormatNumber(s.utility.overall) << ", risk "
          << FormatNumber(s.risk.grand_average) << '\n';
    } else {
      err << s.label << ": failed: " << s.error << '\n';
    }
  }
  out << "wrote report.json, tcap.csv, utility.csv, rumap.csv, rumap.svg to "
      << cfg.output_dir << '\n';
  return report.has_errors() ? kExitPartial : kExitOk;
}

int CmdSynth(const std::string& config_path, const std::string& method,
             std::optional<int64_t> n, const std::string& label, std::ostream& out,
             std::ostream& err) {
  if (!n) {
    err << "usage: synth requires --n\n";
    return kExitUsage;
  }
  if (*n < 1) {
    err << "usage: --n must be at least 1\n";
    return kExitUsage;
  }
  if (method != "cart" && method != "marginal") {
    err << "usage: --method must be cart or marginal\n";
    return kExitUsage;
  }
  try {
    const RunConfig cfg = LoadRunConfig(config_path);
    if (!cfg.seed) ConfigError("seed", "required for synthesis");
    auto schema = LoadSchemaShared(cfg.schema);
    const Dataset orig = LoadCsv(cfg.original, schema);
    std::vector<DataRule> rules;
    if (cfg.rules) rules = LoadRulesFile(*cfg.rules);
    ValidateRules(*schema, rules);

    const auto rows = static_cast<size_t>(*n);
    int64_t violations = 0;
    std::optional<Dataset> result;
    if (method == "cart") {
      const OrderPolicy policy = cfg.order_policy == "as_given" ? OrderPolicy::kAsGiven
                                                                : OrderPolicy::kCategoryCount;
      const auto order = OrderVariables(orig, policy, cfg.first_variable);
      CartParams params{cfg.min_leaf, cfg.max_depth};
      SequentialSynthesis s = SynthCartSequential(orig, order, rules, params, rows, *cfg.seed);
      violations = s.violations_before;
      for (const std::string& v : s.constant_responses) {
        err << "warning: " << v << " is constant in the original (single-leaf tree)\n";
      }
      result.emplace(std::move(s.data));
    } else {
      Dataset raw = SynthMarginal(orig, rows, *cfg.seed);
      violations = CountRuleViolations(raw, rules);
      result.emplace(rules.empty() ? std::move(raw) : ApplyRules(raw, rules));
    }
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const fs::path target = dir / (label + ".csv");
    SaveCsv(*result, target.string());
    out << "rule violations before enforcement: " << violations << '\n';
    out << "wrote " << target.string() << " (" << result->n_rows() << " rows)\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitOk;
}

int CmdSchema(const std::string& in_path, const std::set<std::string>& hints,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
  try {
    const Schema schema = InferSchemaFile(in_path, hints);
    for (const std::string& h : hints) {
      if (!schema.Find(h)) err << "warning: hinted column " << h << " not in header\n";
    }
    SaveSchemaFile(schema, out_path);
    out << "wrote " << out_path << " (" << schema.size() << " variables)\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitOk;
}

int CmdSimulate(int64_t n, uint64_t seed, const std::string& out_path,
                const std::string& schema_out, std::ostream& out, std::ostream& err) {
  if (n < 1) {
    err << "usage: --n must be at least 1\n";
    return kExitUsage;
  }
  try {
    const Dataset ds = SimulateCensus(static_cast<size_t>(n), seed);
    SaveCsv(ds, out_path);
    if (!schema_out.empty()) SaveSchemaFile(ds.schema(), schema_out);
    out << "wrote " << out_path << " (" << ds.n_rows() << " rows)\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitOk;
}

int CmdCheckRules(const std::string& data_path, const std::string& schema_path,
                  const std::string& rules_path, std::ostream& out, std::ostream& err) {
  try {
    auto schema = LoadSchemaShared(schema_path);
    const Dataset ds = LoadCsv(data_path, schema);
    const auto rules = LoadRulesFile(rules_path);
    const int64_t violations = CountRuleViolations(ds, rules);
    out << "rule violations: " << violations << '\n';
    return violations == 0 ? kExitOk : kExitPartial;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
}

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk-utility evaluation of synthetic microdata", "rutk"};
  app.require_subcommand(1);

  std::string config;
  int jobs = 1;
  auto* evaluate = app.add_subcommand("evaluate", "Score synthetic datasets against the original");
  evaluate->add_option("--config", config, "Run configuration (JSON)")->required();
  evaluate->add_option("--jobs", jobs, "Concurrent subjects")->check(CLI::PositiveNumber);

  std::string method = "cart";
  std::optional<int64_t> n;
  std::string label;
  auto* synth = app.add_subcommand("synth", "Generate a baseline synthetic dataset");
  synth->add_option("--config", config, "Run configuration (JSON)")->required();
  synth->add_option("--method", method, "cart or marginal")
      ->check(CLI::IsMember({"cart", "marginal"}));
  synth->add_option("--n", n, "Number of rows")->required();
  synth->add_option("--label", label, "Output label (<label>.csv)")->required();

  std::string in_path;
  std::string out_path;
  std::vector<std::string> hints;
  auto* schema = app.add_subcommand("schema", "Infer a schema file from a CSV");
  schema->add_option("--in", in_path, "Input CSV")->required();
  schema->add_option("--int-hint", hints, "Columns to treat as integers");
  schema->add_option("--out", out_path, "Output schema JSON")->required();

  int64_t sim_n = 10000;
  uint64_t seed = 1991;
  std::string schema_out;
  auto* simulate = app.add_subcommand("simulate", "Write the simulated census corpus");
  simulate->add_option("--n", sim_n, "Number of rows");
  simulate->add_option("--seed", seed, "Generator seed");
  simulate->add_option("--out", out_path, "Output CSV")->required();
  simulate->add_option("--schema-out", schema_out, "Also write its schema JSON");

  std::string data_path;
  std::string rules_path;
  auto* check = app.add_subcommand("check-rules", "Count data-rule violations");
  check->add_option("--data", data_path, "Dataset CSV")->required();
  check->add_option("--schema", in_path, "Schema JSON")->required();
  check->add_option("--rules", rules_path, "Rules JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (evaluate->parsed()) return CmdEvaluate(config, jobs, out, err);
  if (synth->parsed()) return CmdSynth(config, method, n, label, out, err);
  if (schema->parsed()) {
    return CmdSchema(in_path, std::set<std::string>(hints.begin(), hints.end()),
                     out_path, out, err);
  }
  if (simulate->parsed()) return CmdSimulate(sim_n, seed, out_path, schema_out, out, err);
  if (check->parsed()) return CmdCheckRules(data_path, in_path, rules_path, out, err);
  return kExitUsage;
}

}  // namespace rutk
