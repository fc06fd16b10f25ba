#pragma once

// Executes run / sweep / verify campaigns. All artifacts are produced in memory
// first; the output directory is only created once the command has finished.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "netcbf/config.hpp"

namespace netcbf {

enum class Command { Run, Sweep, Verify };

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kBoundViolated = 1;
inline constexpr int kHypothesisNotMet = 2;
inline constexpr int kNumerical = 3;  // blowup, domain exit, non-finite values
inline constexpr int kConfig = 4;
}  // namespace exit_code

struct Artifact {
  std::string name;
  std::string content;
};

struct RunOutcome {
  int exit_code = exit_code::kOk;
  std::vector<Artifact> artifacts;  // manifest.json is always last when present
  nlohmann::json verdicts = nlohmann::json::object();
  std::vector<std::string> messages;
};

struct RunnerOptions {
  std::size_t jobs = 1;
};

std::string toolkit_version();
std::string sha256_hex(const std::string& data);

/// Never throws for model/numerical failures; they map to exit codes with no artifacts.
RunOutcome execute(Command command, const ExperimentConfig& config, const RunnerOptions& options = {});

/// Writes the artifacts into `dir` atomically (stage + rename). An existing `dir` is replaced
/// only if it holds a previous manifest or is empty.
void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir);

}  // namespace netcbf
