#pragma once

/// @file orchestrate.hpp
/// @brief Executes a validated RunConfig and writes its artifacts.
///
/// Layout under output.dir: report.csv and snapshots/ for a single run, one
/// n<res>/ directory per level for a ladder, trajectories.csv and
/// diagnostics.csv when tracing is configured, and manifest.json last.

#include "shearflow/config.hpp"
#include "shearflow/particles.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace shearflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunOutcome {
    PlannedRun plan;
    bool ok = true;
    std::string failure;
    std::vector<std::string> warnings;
    RegularityReport report;
};

struct OrchestrateResult {
    int exit_code = kExitOk;
    std::vector<RunOutcome> runs;
    std::optional<DashtiRobinsonResult> dashti_robinson;
    std::filesystem::path manifest;
};

/// Runs every planned level, the optional trace on the finest level, and
/// writes manifest.json. Numerical failures leave partial artifacts and give
/// exit code kExitNumerical. `log` receives one line per event (may be null).
OrchestrateResult orchestrate(const RunConfig& config, std::ostream* log = nullptr);

/// Writes trajectories.csv (and diagnostics.csv when eps > 0) into `dir`.
/// Returns the written files.
std::vector<std::filesystem::path> write_trace_outputs(const VelocityHistory& history, const BundleSpec& spec,
                                                       double dt_ode, const std::filesystem::path& dir);

/// Lowercase hex SHA-256 of a byte string / file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Reads a whole file; throws InvalidInput when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes a whole file, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& bytes);

} // namespace shearflow
