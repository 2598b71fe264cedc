// Copyright 2026 The bellkc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace bellkc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,  // a verification did not hold, or an unexpected error
  kExitConfig = 2,  // usage or config parse error
  kExitValidation = 3,
  kExitIo = 4,
};

enum class OutputFormat { Text, Json, Csv };

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  OutputFormat format = OutputFormat::Text;
  bool quiet = false;
  unsigned workers = 1;
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "BELLKC_OUT_DIR";

int cmd_simulate(const GlobalOptions& g, const std::filesystem::path& config, std::ostream& out,
                 std::ostream& err);
int cmd_kc_verify(const GlobalOptions& g, const std::filesystem::path& config, std::ostream& out,
                  std::ostream& err);

struct GleasonOptions {
  int dim = 3;
  std::size_t n_contexts = 1000;
  std::optional<std::filesystem::path> state_file;
};
int cmd_gleason_check(const GlobalOptions& g, const GleasonOptions& opts, std::ostream& out,
                      std::ostream& err);

struct LhvOptions {
  std::optional<std::filesystem::path> tables;
  std::optional<std::filesystem::path> config;
};
int cmd_lhv_bound(const GlobalOptions& g, const LhvOptions& opts, std::ostream& out, std::ostream& err);

int cmd_plot(const GlobalOptions& g, const std::filesystem::path& config, const std::filesystem::path& svg,
             std::ostream& out, std::ostream& err);

/// Full command line: global flags plus one subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bellkc::cli
