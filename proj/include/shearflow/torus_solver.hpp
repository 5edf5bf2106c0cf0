#pragma once

/// @file torus_solver.hpp
/// @brief Fourier-Galerkin time integration of the shear-thinning system on the torus.
///
/// The linear part (nu0 + nu1*sigma/2) Lap u is integrated exactly per mode
/// (or by Crank-Nicolson); the remainder nu1 (div S(Du) - sigma/2 Lap u),
/// the convection and the forcing are explicit. sigma is a constant
/// stabilization weight; at p = 2 with sigma = 1 the explicit stress part
/// vanishes identically.

#include "shearflow/constitutive.hpp"
#include "shearflow/monitors.hpp"
#include "shearflow/torus_field.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shearflow {

enum class TimeScheme { imex_cn_ab2, imex_euler, rk3_explicit };
enum class DiffusionMode { integrating_factor, crank_nicolson };

TimeScheme parse_time_scheme(const std::string& name);
std::string to_string(TimeScheme scheme);

struct SolverConfig {
    double dt = 1e-3;
    double T = 1.0;
    TimeScheme scheme = TimeScheme::imex_cn_ab2;
    DiffusionMode diffusion = DiffusionMode::integrating_factor;
    int snapshot_stride = 0;   ///< 0 -> only first and last state
    int monitor_stride = 1;
    std::uint64_t seed = 0;
    std::optional<double> stabilization; ///< sigma; automatic when unset
    double cfl_limit = 1.0;

    /// Throws InvalidInput on a bad combination (e.g. nu0 = 0 without rk3).
    void validate(const StressParams& params) const;
    /// Number of uniform steps covering [0, T].
    [[nodiscard]] int step_count() const;
};

/// Time-dependent body force. Returns a raw (possibly non-solenoidal) field;
/// the solver projects it.
class TorusForcing {
public:
    using Callback = std::function<std::array<double, 2>(double x1, double x2, double t)>;

    TorusForcing() = default; ///< zero forcing
    static TorusForcing zero() { return {}; }
    static TorusForcing steady(TorusField f);
    static TorusForcing analytic(Callback cb, bool time_dependent);
    /// Piecewise-linear interpolation between snapshots (times strictly increasing).
    static TorusForcing series(std::vector<double> times, std::vector<TorusField> fields);

    [[nodiscard]] bool is_zero() const { return kind_ == Kind::zero; }
    [[nodiscard]] TorusField at(double t, int n) const;

private:
    enum class Kind { zero, steady, analytic, series };
    Kind kind_ = Kind::zero;
    bool time_dependent_ = false;
    Callback callback_;
    std::shared_ptr<const std::vector<TorusField>> fields_;
    std::shared_ptr<const std::vector<double>> times_;
};

struct FourierModeSpec {
    int k1 = 0;
    int k2 = 0;
    std::array<double, 2> sin_amp{0.0, 0.0};
    std::array<double, 2> cos_amp{0.0, 0.0};
};

/// Description of the initial velocity.
struct TorusInitialSpec {
    enum class Kind { zero, taylor_green, shear, modes, spectrum, snapshot };
    Kind kind = Kind::zero;
    double amplitude = 1.0;
    int wavenumber = 1;        ///< shear: u = amplitude * (sin(k x2), 0)
    double alpha = 1.1;        ///< spectrum: shell amplitude ~ |k|^-alpha
    std::vector<FourierModeSpec> modes;
    std::string path;          ///< snapshot file
};

struct TorusInitialData {
    TorusField u;
    double projection_defect = 0.0; ///< ||w - Pw|| / ||w|| of the unprojected data
    std::vector<std::string> warnings;
};

/// Builds P_m u0: sampled or synthesized, Leray-projected, truncated at `cutoff`.
/// The random spectrum is a deterministic function of (seed, k), so coarser
/// resolutions see exactly the low modes of finer ones.
TorusInitialData make_initial_field(const TorusInitialSpec& spec, int n, int cutoff, std::uint64_t seed);

struct TorusSolverState {
    double t = 0.0;
    long step_index = 0;
    TorusField u;
    StressParams params;
    int cutoff = 0;
    double sigma = 0.0;
    TorusForcing forcing;
    // AB2 history
    std::array<std::vector<Complex>, 2> previous_rhs;
    bool has_previous = false;
    double previous_dt = 0.0;
};

/// Stabilization weight used when SolverConfig::stabilization is unset.
double automatic_stabilization(const StressParams& params, const TorusField& u0, TimeScheme scheme);

TorusSolverState init_torus(const TorusField& u0, const SolverConfig& config, const StressParams& params,
                            TorusForcing forcing = {});

/// Advances one step. Throws NumericalFailure when the CFL guard rejects the
/// step or the result is not finite; the state is left unchanged then.
void step(TorusSolverState& state, double dt, TimeScheme scheme, DiffusionMode diffusion = DiffusionMode::integrating_factor,
          double cfl_limit = 1.0);

/// max|u| * dt / h on the grid.
double cfl_number(const TorusField& u, double dt);

struct TorusSnapshot {
    double t = 0.0;
    TorusField u;
};

struct TorusRunResult {
    RegularityReport report;
    std::vector<TorusSnapshot> snapshots;
    std::optional<std::string> failure;   ///< set when a step failed; report is partial
    double projection_defect = 0.0;
    std::vector<std::string> warnings;
};

/// Steps to T with monitors every monitor_stride steps (and at the end) and
/// snapshots every snapshot_stride steps.
TorusRunResult run_torus(const SolverConfig& config, const StressParams& params, const TorusInitialSpec& u0,
                         int n, TorusForcing forcing = {});

/// Same, from an explicit initial field.
TorusRunResult run_torus(const SolverConfig& config, const StressParams& params, const TorusField& u0,
                         TorusForcing forcing = {});

} // namespace shearflow
