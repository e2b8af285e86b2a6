// Copyright 2026 The fermicert Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Links only the C interface of libfermicert.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fermicert/fermicert.h"
#include "json.hpp"

namespace {

constexpr int kUsageError = 1;

int usage_error(const std::string& field, const std::string& message) {
  const nlohmann::json err = {
      {"status", "error"},
      {"exit_code", kUsageError},
      {"error",
       {{"code", "usage"},
        {"message", message},
        {"diagnostics", nlohmann::json::array({{{"field", field}, {"message", message}}})}}}};
  std::cout << err.dump(2) << '\n';
  return kUsageError;
}

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

int validate(const std::string& text) {
  char* diagnostics = nullptr;
  if (fc_validate_config(text.c_str(), &diagnostics) != FC_OK) {
    return usage_error("", fc_last_error());
  }
  const auto list = nlohmann::json::parse(diagnostics);
  fc_string_free(diagnostics);
  if (list.empty()) {
    std::cout << nlohmann::json({{"status", "valid"}, {"diagnostics", list}}).dump(2) << '\n';
    return 0;
  }
  const nlohmann::json err = {
      {"status", "error"},
      {"exit_code", kUsageError},
      {"error", {{"code", "config"}, {"message", "configuration is invalid"}, {"diagnostics", list}}}};
  std::cout << err.dump(2) << '\n';
  return kUsageError;
}

int run(const std::string& text, const std::string& out_dir, const fc_run_options& options) {
  int exit_code = kUsageError;
  char* summary = nullptr;
  if (fc_run_config(text.c_str(), out_dir.c_str(), &options, &exit_code, &summary) != FC_OK) {
    return usage_error("", fc_last_error());
  }
  std::cout << summary;
  fc_string_free(summary);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fermicert: certified numerics for lattice fermion dynamics"};
  app.set_version_flag("--version", std::string(fc_version()));
  std::string config_path;
  std::string out_dir = "results";
  std::uint64_t seed = 0;
  int grid = 0;
  double tol = 0.0;
  auto* config_opt = app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out", out_dir, "Output directory for reports")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  auto* grid_opt = app.add_option("--grid", grid, "Override the number of grid points")
                       ->check(CLI::PositiveNumber);
  auto* tol_opt = app.add_option("--tol", tol, "Override the acceptance tolerance")
                      ->check(CLI::PositiveNumber);
  app.footer("Commands: run (default), validate. Threads: FERMICERT_THREADS.");
  auto* validate_cmd = app.add_subcommand("validate", "Check a config and list diagnostics");
  auto* run_cmd = app.add_subcommand("run", "Execute the configured task");
  app.require_subcommand(0, 1);
  app.fallthrough();
  validate_cmd->fallthrough();
  run_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error("", e.what());
  }

  if (config_opt->count() == 0) return usage_error("--config", "--config <path> is required");
  std::string text;
  if (!read_file(config_path, text)) {
    return usage_error("--config", "cannot read config file " + config_path);
  }
  if (validate_cmd->parsed()) return validate(text);

  fc_run_options options{};
  if (seed_opt->count() > 0) {
    options.has_seed = 1;
    options.seed = seed;
  }
  if (grid_opt->count() > 0) {
    options.has_grid = 1;
    options.grid = grid;
  }
  if (tol_opt->count() > 0) {
    options.has_tol = 1;
    options.tol = tol;
  }
  return run(text, out_dir, options);
}
