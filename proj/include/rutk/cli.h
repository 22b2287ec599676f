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

#ifndef RUTK_CLI_H_
#define RUTK_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rutk {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitUsage = 64;

struct SyntheticEntry {
  std::string label;
  std::string path;
};

// Run configuration file. Relative paths resolve against the directory of
// the configuration file.
struct RunConfig {
  std::string original;
  std::string schema;
  std::vector<SyntheticEntry> synthetic;
  std::string risk;
  std::optional<std::string> rules;
  std::optional<uint64_t> seed;
  std::string output_dir = ".";
  bool cio_floor_at_zero = false;
  bool include_original_point = true;
  int bin_width = 5;
  std::string order_policy = "category_count";
  std::optional<std::string> first_variable;
  int min_leaf = 5;
  int max_depth = 30;
  std::string timestamp;
  // Normalized JSON of the file as read.
  std::string echo = "{}";
};

// Throws rutk::Error(kConfig) with a field path such as
// "config.synthetic[1].label".
RunConfig ParseRunConfig(const std::string& text, const std::string& base_dir);
RunConfig LoadRunConfig(const std::string& path);

// Each command reports progress on `out`, problems on `err`, and returns an
// exit code.
int CmdEvaluate(const std::string& config_path, int jobs, std::ostream& out,
                std::ostream& err);
int CmdSynth(const std::string& config_path, const std::string& method,
             std::optional<int64_t> n, const std::string& label,
             std::ostream& out, std::ostream& err);
int CmdSchema(const std::string& in_path, const std::set<std::string>& hints,
              const std::string& out_path, std::ostream& out, std::ostream& err);
int CmdSimulate(int64_t n, uint64_t seed, const std::string& out_path,
                const std::string& schema_out, std::ostream& out, std::ostream& err);
int CmdCheckRules(const std::string& data_path, const std::string& schema_path,
                  const std::string& rules_path, std::ostream& out, std::ostream& err);

// Parses argv and dispatches; the `rutk` binary is a thin wrapper.
int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rutk

#endif  // RUTK_CLI_H_
