// Acceptance suite: runs every numbered criterion (plus the trend extras) at
// full desk scale and prints one pass/fail line per check.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "bbmx/verify.hpp"

int main(int argc, char** argv) {
  bbmx::VerifyOptions options;
  options.seed = 42;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--smoke") == 0) options.smoke = true;
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      options.seed = std::strtoull(argv[++i], nullptr, 10);
    }
  }

  const std::vector<bbmx::DiagnosticReport> reports =
      bbmx::run_suite(bbmx::Suite::kAll, options);
  std::size_t criteria_failed = 0;
  std::size_t extras_failed = 0;
  for (const auto& report : reports) {
    std::puts(bbmx::format_report_line(report).c_str());
    if (!report.pass) {
      (report.id <= 12 ? criteria_failed : extras_failed) += 1;
    }
  }
  std::printf("summary: %zu checks, %zu criterion failures, %zu extra failures\n",
              reports.size(), criteria_failed, extras_failed);
  return (criteria_failed + extras_failed) == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
