#pragma once

// Command dispatch for the nctorus tool. Each command reads the sections of a ProblemFile it needs
// and returns a report; the tool only handles flags, files and exit codes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nctorus/problem.hpp"

namespace nctorus {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInconclusive = 2;

inline constexpr int kReportSchema = 1;
inline constexpr const char* kLibraryVersion = "0.3.0";

/// Command-line overrides of problem-file settings.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> truncation;
  std::optional<double> tol_rel;
  std::optional<int> bound;
  bool exact = false;
};

struct RunResult {
  nlohmann::json report;
  int exit_code = kExitOk;
};

const std::vector<std::string>& command_names();

/// Throws ParseError for an unknown command or a missing section; library errors propagate.
RunResult run(const std::string& command, const ProblemFile& pf, const RunOptions& opts = {});

/// Full pipeline used by the tool: parse, run, map every failure to an exit code and an error report.
RunResult run_text(const std::string& command, const std::string& problem_text, const RunOptions& opts = {});

}  // namespace nctorus
