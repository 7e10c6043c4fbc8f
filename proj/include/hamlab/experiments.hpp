#pragma once
// Declarative experiment runner. A JSON config names one experiment kind plus
// its parameter block; run_experiment executes it, writes summary.json and CSV
// data files into an output directory, and returns a one-line verdict with a
// process exit code (0 success, 2 hypothesis-unmet or nothing-found report,
// 1 reserved for config/IO errors raised as exceptions).
//
// Numeric outputs are a pure function of the config: all randomness flows
// from the single `seed` field through counter-based generators, and worker
// threads only split index ranges of independent work items, so CSV bodies
// are byte-identical across reruns and thread counts. Wall-clock timestamps
// appear only inside the summary's "meta" block.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace hamlab {

// Schema violation carrying the JSON path of the offending field, e.g.
// "params.profile.height". Callers map it to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ParamDoc {
  std::string name;
  std::string doc;  // includes type, constraints and the default if optional
};

struct ExperimentDoc {
  std::string kind;
  std::string summary;
  std::vector<ParamDoc> params;
};

// The nine experiment kinds with their parameter documentation, in the order
// `list` prints them.
const std::vector<ExperimentDoc>& experiment_catalog();

// Validates the raw config against its kind's schema and returns a normalized
// copy with every optional field filled with its default. Throws ConfigError
// with the field path on any violation. Idempotent on its own output.
nlohmann::json validate_config(const nlohmann::json& config);

// Reads, parses and validates a config file. Parse failures throw ConfigError
// with the filename as the path.
nlohmann::json load_config_file(const std::string& path);

struct ExperimentOutcome {
  int exit_code = 0;
  std::string verdict;              // the one-line report, also in the summary
  std::vector<std::string> files;   // names written inside out_dir
};

// Runs one experiment, creating out_dir if needed. threads >= 1 caps the
// worker pool for embarrassingly parallel sweeps without affecting results.
ExperimentOutcome run_experiment(const nlohmann::json& config,
                                 const std::string& out_dir, int threads = 1);

}  // namespace hamlab
