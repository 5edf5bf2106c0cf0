#pragma once

/// @file config.hpp
/// @brief Run configuration: a small TOML subset, validation and ladder plans.
///
/// Supported syntax: `[section]` headers, `key = value` pairs, `#` comments.
/// Values are numbers, booleans, double-quoted strings and (nested) arrays.
/// The accepted keys are listed in docs/format.md.

#include "shearflow/channel_solver.hpp"
#include "shearflow/constitutive.hpp"
#include "shearflow/errors.hpp"
#include "shearflow/monitors.hpp"
#include "shearflow/particles.hpp"
#include "shearflow/snapshot.hpp"
#include "shearflow/torus_solver.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace shearflow {

// ---------------------------------------------------------------------------
// TOML subset

struct TomlValue {
    using Array = std::vector<TomlValue>;
    std::variant<double, bool, std::string, Array> value;
    bool integer = false; ///< number written without fraction or exponent
    int line = 0;

    [[nodiscard]] bool is_number() const { return std::holds_alternative<double>(value); }
    [[nodiscard]] bool is_bool() const { return std::holds_alternative<bool>(value); }
    [[nodiscard]] bool is_string() const { return std::holds_alternative<std::string>(value); }
    [[nodiscard]] bool is_array() const { return std::holds_alternative<Array>(value); }
};

/// Keys are "section.key"; keys before any header have no prefix.
using TomlTable = std::map<std::string, TomlValue>;

/// Throws ConfigSyntaxError with the offending line number.
TomlTable parse_toml(const std::string& text);

class ConfigSyntaxError : public InvalidInput {
public:
    ConfigSyntaxError(int line, const std::string& what);
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

/// All semantic violations of a config, reported together.
class ConfigValidationError : public InvalidInput {
public:
    explicit ConfigValidationError(std::vector<std::string> violations);
    [[nodiscard]] const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

// ---------------------------------------------------------------------------
// Run configuration

struct ForcingSpec {
    enum class Kind { zero, constant, modes, file };
    Kind kind = Kind::zero;
    std::array<double, 2> value{0.0, 0.0};   ///< constant
    std::vector<FourierModeSpec> modes;      ///< torus only
    double amplitude = 1.0;
    double frequency = 0.0;                  ///< modes: multiplied by cos(frequency t)
    std::filesystem::path path;              ///< SF2D snapshot used as a steady force
};

struct OutputSpec {
    std::filesystem::path dir = "out";
    bool write_snapshots = true;
};

struct LadderSpec {
    std::vector<int> resolutions;
    bool parallel = false;
    bool diffusive_dt = false; ///< scale dt with h^2 relative to the first level
    double p_exponent = 2.0;
    DashtiRobinsonThresholds thresholds;
};

struct TraceSpec {
    std::vector<Point> points;
    double eps = 0.0;
    int satellites = 4;
    double dt = 1e-3;
    int output_stride = 1;
};

struct RunConfig {
    Geometry geometry = Geometry::torus;
    StressParams params;
    int n1 = 32; ///< torus resolution or channel x1 samples
    int n2 = 32; ///< channel x2 intervals (torus: equal to n1)
    SolverConfig solver;
    TorusInitialSpec torus_initial;
    ChannelInitialSpec channel_initial;
    ForcingSpec forcing;
    OutputSpec output;
    std::optional<LadderSpec> ladder;
    std::optional<TraceSpec> trace;
    std::string source_text; ///< raw config text (hashed into the manifest)
};

/// Parses and validates. Relative paths resolve against `base_dir`.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig parse_config(const std::filesystem::path& path);

struct PlannedRun {
    int index = 0;
    int n1 = 0;
    int n2 = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::filesystem::path dir;
};

/// One entry per ladder level (or a single entry without a ladder).
std::vector<PlannedRun> expand_plan(const RunConfig& config);
/// Stable text rendering of a plan (used for golden-file tests and --dry-run).
std::string render_plan(const RunConfig& config, const std::vector<PlannedRun>& plan);

/// Reads "x1,x2" lines; blank lines, '#' comments and a non-numeric header are skipped.
std::vector<Point> read_points_csv(const std::filesystem::path& path);

} // namespace shearflow
