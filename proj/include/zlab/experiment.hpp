#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zlab/serialize.hpp"

namespace zlab {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ExperimentResult {
  json report;
  std::vector<std::pair<std::string, CsvTable>> tables;  // file stem, table
  std::vector<PlotSeries> plots;
  std::vector<std::string> audit_failures;
  bool ok() const { return audit_failures.empty(); }
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  unsigned threads = 0;               // 0 keeps the current cap
};

const std::vector<std::string>& experiment_commands();

/// Schema diagnostics for a command's config; empty when valid.
std::vector<std::string> validate_config(const std::string& command, const json& config, bool seed_given = false);

/// Throws ConfigError on an invalid config (message lists the diagnostics).
ExperimentResult run_experiment(const std::string& command, const json& config, const RunOptions& opt = {});

/// 64-bit FNV-1a of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const json& config);
std::uint64_t fnv1a(const std::string& bytes);

/// report.json, <table>.csv and plot_<series>.csv in dir (created when missing).
void write_outputs(const ExperimentResult& r, const std::string& dir);

/// Read, validate, run and write. Exit code 0 on success, 1 on config error,
/// 2 on audit failure; diagnostics receive the human-readable reason.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt,
                const std::string& out_dir, std::string& diagnostics);

}  // namespace zlab
