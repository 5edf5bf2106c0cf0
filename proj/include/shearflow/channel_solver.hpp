#pragma once

/// @file channel_solver.hpp
/// @brief Time integration on the periodic channel with no-slip walls at x2 = +-1.
///
/// Crank-Nicolson / Adams-Bashforth 2 with the linear part
/// (nu0 + nu1*sigma/2) Lap_h implicit (one tridiagonal solve per x1 mode),
/// the stress remainder, convection and forcing explicit, followed by an
/// incremental pressure projection with pressure at cell centres.

#include "shearflow/channel_field.hpp"
#include "shearflow/constitutive.hpp"
#include "shearflow/monitors.hpp"
#include "shearflow/torus_solver.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shearflow {

class ChannelForcing {
public:
    using Callback = std::function<std::array<double, 2>(double x1, double x2, double t)>;

    ChannelForcing() = default; ///< zero forcing
    static ChannelForcing zero() { return {}; }
    static ChannelForcing constant(double f1, double f2);
    static ChannelForcing analytic(Callback cb, bool time_dependent);
    static ChannelForcing steady(ChannelField f);

    [[nodiscard]] bool is_zero() const { return kind_ == Kind::zero; }
    [[nodiscard]] bool time_dependent() const { return time_dependent_; }
    /// Node values (row-major (n2+1) x n1) on the grid of `like`.
    [[nodiscard]] std::array<std::vector<double>, 2> nodes(const ChannelField& like, double t) const;

private:
    enum class Kind { zero, analytic, steady };
    Kind kind_ = Kind::zero;
    bool time_dependent_ = false;
    Callback callback_;
    std::shared_ptr<const ChannelField> field_;
};

struct ChannelInitialSpec {
    enum class Kind { zero, poiseuille, stokes_mode, stream, snapshot };
    Kind kind = Kind::zero;
    double amplitude = 1.0;
    int wavenumber = 1; ///< stokes_mode: sin(k pi x2); stream: sin(k pi x1)
    std::string path;
};

struct ChannelInitialData {
    ChannelField u;
    double projection_defect = 0.0; ///< discrete divergence L2 before projection
    std::vector<std::string> warnings;
};

/// Samples, truncates to the 2/3 band in x1 and projects the initial velocity.
ChannelInitialData make_channel_initial(const ChannelInitialSpec& spec, int n1, int n2);

struct ChannelSolverState {
    double t = 0.0;
    long step_index = 0;
    ChannelField u;
    StressParams params;
    int cutoff = 0;
    double sigma = 0.0;
    ChannelForcing forcing;
    std::array<std::vector<Complex>, 2> previous_rhs;
    bool has_previous = false;
    double previous_dt = 0.0;
};

double channel_automatic_stabilization(const StressParams& params, const ChannelField& u0);

/// Throws InvalidInput for the fully explicit scheme (not offered on the channel).
ChannelSolverState init_channel(const ChannelField& u0, const SolverConfig& config, const StressParams& params,
                                ChannelForcing forcing = {});

void step_channel(ChannelSolverState& state, double dt, TimeScheme scheme, double cfl_limit = 1.0);

/// max|u| dt / min(h1, h2).
double channel_cfl_number(const ChannelField& u, double dt);

/// Discrete div S(Du) at the nodes (half spectra per row, walls zero).
std::array<std::vector<Complex>, 2> channel_stress_divergence(const ChannelField& u, const StressParams& params, int cutoff);

/// Columns appended to the base report on channel runs.
const std::vector<std::string>& channel_extra_columns();

struct ChannelSnapshot {
    double t = 0.0;
    ChannelField u;
};

struct ChannelRunResult {
    RegularityReport report;
    std::vector<ChannelSnapshot> snapshots;
    std::optional<std::string> failure;
    double projection_defect = 0.0;
    std::vector<std::string> warnings;
    int alpha1_violations = 0; ///< monitored samples with min alpha1 < nu0
};

ChannelRunResult run_channel(const SolverConfig& config, const StressParams& params, const ChannelInitialSpec& u0,
                             int n1, int n2, ChannelForcing forcing = {});

ChannelRunResult run_channel(const SolverConfig& config, const StressParams& params, const ChannelField& u0,
                             ChannelForcing forcing = {});

} // namespace shearflow
