#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbmx/stats.hpp"

namespace bbmx {

// Named groups of acceptance checks. Each numbered criterion is pinned to a
// fixed scale, tolerance and substream; extra trend diagnostics carry ids
// above 100.
enum class Suite {
  kIdentities,   // 1, 3
  kMartingales,  // 2 (+ trend extras 101-103)
  kThinning,     // 4
  kSpine,        // 5
  kExtremes,     // 6-11 (+ near-collision extra 106)
  kDecoration,   // 12 (+ acceptance-rate extras 104-105)
  kAll,
};

Suite parse_suite(const std::string& name);  // throws on unknown suite
std::string suite_name(Suite suite);

struct VerifyOptions {
  std::uint64_t seed = 42;
  int workers = 0;
  // Smoke mode divides replica counts by 20 (floor 100) for quick machinery
  // checks; statistical tolerances are calibrated for full scale only.
  bool smoke = false;
};

std::vector<DiagnosticReport> run_suite(Suite suite,
                                        const VerifyOptions& options);

bool all_pass(std::span<const DiagnosticReport> reports);
nlohmann::ordered_json reports_json(Suite suite,
                                    std::span<const DiagnosticReport> reports,
                                    const VerifyOptions& options);
std::string format_report_line(const DiagnosticReport& report);

}  // namespace bbmx
