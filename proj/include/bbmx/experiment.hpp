#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbmx/bbm.hpp"

namespace bbmx {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Experiment description, parsed from a JSON config file. Offspring entries
// map child counts to probabilities; the law must have mean 2.
struct RunConfig {
  double horizon = 6.0;
  std::vector<OffspringDistribution::Entry> offspring = {{2, 1.0}};
  std::vector<double> checkpoints;
  double cutoff = -8.0;
  std::optional<PruneBarrier> prune;
  std::uint64_t replicas = 100;
  std::uint64_t seed = 42;
  std::optional<double> thin_q;  // emit cluster decompositions when set
  int workers = 0;               // 0 = BBMX_WORKERS env, else hardware
  std::uint64_t max_population = TreeLimits{}.max_population;

  BbmConfig bbm_config() const;
  nlohmann::ordered_json canonical_json() const;
};

// Throws std::invalid_argument naming the offending field.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// FNV-1a 64-bit digest, used for config hashes and output digests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

struct RunOutcome {
  std::filesystem::path directory;
  std::string status;  // "ok" or "aborted:resource-cap"
  std::uint64_t replicas_written = 0;
};

// Runs the experiment into `out_dir`: writes replicas.jsonl (one record per
// replica, replica order), summary.json and manifest.json. Identical
// (config, seed) inputs reproduce identical replica and summary bytes.
RunOutcome run_experiment(const RunConfig& config,
                          const std::filesystem::path& out_dir);

// Re-summarizes an existing run directory; returns the summary JSON.
nlohmann::ordered_json summarize_run(const std::filesystem::path& run_dir);

}  // namespace bbmx
