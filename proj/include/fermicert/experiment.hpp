// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

// Configuration-driven experiments: validation, task execution and report
// emission (JSON, CSV, plot data).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fermicert {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr std::size_t kDefaultSiteCap = 12;

struct Diagnostic {
  std::string field;
  std::string message;
};

/// Command-line overrides applied on top of the config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<double> tol;
};

enum ExitCode : int { kExitSuccess = 0, kExitUsage = 1, kExitCertificationFailed = 2 };

/// Schema and cross-field checks; empty when the config is runnable.
std::vector<Diagnostic> validate_config(const nlohmann::json& config);

/// Parses text first; a parse failure yields a single diagnostic.
std::vector<Diagnostic> validate_config_text(const std::string& text);

nlohmann::json apply_overrides(nlohmann::json config, const Overrides& overrides);

struct RunResult {
  int exit_code = kExitSuccess;
  /// Report (success or certification failure) or error object.
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;
};

/// Validates, executes the task and writes <name>.json, <name>.csv and
/// <name>.plot.dat into out_dir. Never throws.
RunResult run_config(const nlohmann::json& config, const std::filesystem::path& out_dir,
                     const Overrides& overrides = {});
RunResult run_config_text(const std::string& text, const std::filesystem::path& out_dir,
                          const Overrides& overrides = {});

nlohmann::json error_object(const std::string& code, const std::string& message,
                            const std::vector<Diagnostic>& diagnostics = {});

/// Serialized form used for all reports: two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace fermicert
