// Experiment configs and the check -> bound -> tail -> ldp-scan pipeline.
//
// Configs are single files of `key = value` lines (dotted keys for nesting,
// `[..]` lists, `#` comments). Parsing reports every violation with line and
// column, not just the first. A run writes one CSV per stage plus a JSON
// manifest carrying the resolved config, catalog versions, the seed, wall
// times, and FNV-1a checksums of each artifact; outputs are byte-identical
// for a fixed seed at any thread count.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "utail/bounds.hpp"
#include "utail/kernels.hpp"
#include "utail/tail_models.hpp"

namespace utail {

struct ConfigViolation {
  int line = 0;  // 1-based; 0 for file-level problems (e.g. missing keys)
  int column = 0;
  std::string message;
};

struct McConfig {
  std::uint64_t replications = 100000;  // tail-stage Monte Carlo budget
  std::uint64_t seed = 12345;
  double ci_level = 0.99;
};

struct OutputPaths {
  std::string dir = ".";
  // Per-artifact file names, relative to dir unless absolute; empty means
  // "<experiment_id>_<stage>.csv" (manifest: "<experiment_id>_manifest.json").
  std::string check;
  std::string bound;
  std::string tail;
  std::string ldp_scan;
  std::string manifest;
};

struct ExperimentConfig {
  std::string experiment_id;
  std::string model_token;
  std::string kernel_token;
  std::optional<DistributionModel> model;  // engaged when parsing succeeded
  std::optional<KernelSpec> kernel;
  std::vector<int> n_values;
  std::vector<double> t_grid;  // strictly increasing, positive
  double beta = 0.9;
  std::string v_mode_token = "auto";
  VChoice v_choice;
  McConfig mc;
  OutputPaths outputs;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;  // engaged iff violations empty
  std::vector<ConfigViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Parses and validates config text. Collects every syntax and semantic
// violation; `config` is engaged only when the list is empty.
ParseResult parse_config(const std::string& text);

// File wrapper; throws errc::config with all violations joined when the
// file is unreadable or invalid.
ExperimentConfig parse_config_file(const std::string& path);

// "line L, col C: message" per violation, one per line.
std::string format_violations(const std::vector<ConfigViolation>& violations);

// Default beta: 0.9, lowered to min(0.9, 1 - 1/gamma - 0.05) for models
// with a polynomial tail exponent (gamma adjusted for the kernel) so the
// polynomial v cap stays applicable.
double default_beta(const KernelSpec& kernel, const DistributionModel& model);

struct RunOptions {
  std::string out_dir;                        // empty: use config outputs.dir
  std::optional<std::uint64_t> seed;          // overrides config / UTAIL_SEED
  int threads = 1;
  bool assert_properties = false;  // exit 4 on a sandwich violation
  std::ostream* log = nullptr;     // per-stage progress notes
  // Stage selection from {"check", "bound", "tail", "ldp_scan"}; empty runs
  // the full pipeline. The manifest is written either way. The assertion
  // pass needs both "bound" and "tail".
  std::vector<std::string> stages;
};

struct StageArtifact {
  std::string stage;
  std::string path;
  std::string checksum;  // fnv1a64 of file bytes, 16 hex digits
  double wall_ms = 0.0;
};

struct RunReport {
  int exit_code = 0;  // 0 ok, 3 stage failure, 4 assertion violation
  std::uint64_t seed = 0;
  std::vector<StageArtifact> artifacts;
  std::string manifest_path;
  std::string failed_stage;  // empty unless exit_code == 3
  std::string error;
  std::vector<std::string> assert_violations;
};

// Seed precedence: options.seed > UTAIL_SEED environment variable >
// config mc.seed. Stage failures abort the pipeline but still write a
// partial manifest naming the failed stage.
RunReport run_experiment(const ExperimentConfig& config,
                         const RunOptions& options = {});

// CSV headers, exposed so schema checks and readers share one source.
extern const char* const kCheckCsvHeader;
extern const char* const kBoundCsvHeader;
extern const char* const kTailCsvHeader;
extern const char* const kLdpScanCsvHeader;

// RFC-4180 quoting for fields that may hold commas or quotes.
std::string csv_quote(const std::string& field);

// FNV-1a 64 over a file's bytes (host-independent artifact fingerprint);
// throws errc::config when the file cannot be read.
std::uint64_t file_checksum(const std::string& path);
std::string checksum_hex(std::uint64_t checksum);

}  // namespace utail
