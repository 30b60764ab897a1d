#pragma once

#include <memory>
#include <optional>
#include <string>

#include "arsgs/samplers.hpp"

namespace arsgs {

inline constexpr const char* kVersion = "0.1.0";

struct DiagnosticsRequest {
  std::string report_json;
  std::vector<int> acf_coords;  // 1-based coordinate indices
  int max_lag = 50;
  std::string acf_csv;  // optional plot-ready curves
};

// The sampler RunConfig plus target construction, output paths and optional
// post-run diagnostics, parsed from a strict-schema JSON document.
struct ExperimentConfig {
  RunConfig run;
  std::shared_ptr<Target> target;
  std::string chain_csv, trace_csv, summary_json;
  std::string timings_json;        // optional, wall-clock (non-deterministic)
  std::string emit_sigma_csv;      // realized generated matrices, if requested
  std::optional<DiagnosticsRequest> diagnostics;
  std::string config_hash;
};

// Parses and validates the config document. Unknown keys are rejected;
// nothing is executed and no RNG state is touched. base_dir resolves
// relative paths in the document. In-memory callers (the language bindings)
// may omit the outputs block.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir,
                                         bool require_outputs = true);

struct ExperimentResult {
  RunResult run;
  int d = 0;
  int n_regimes = 0;
  int s = 0;
};

// Runs the configured experiment and writes the chain/trace/summary (and
// optional diagnostics/timings) files.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Run without touching the filesystem; used by the language bindings.
ExperimentResult run_experiment_in_memory(const ExperimentConfig& cfg);

std::string summary_json_text(const ExperimentConfig& cfg,
                              const ExperimentResult& res);

}  // namespace arsgs
