#pragma once

/// @file particles.hpp
/// @brief Tracer trajectories dX/dt = u(X, t) over stored velocity histories.

#include "shearflow/channel_field.hpp"
#include "shearflow/snapshot.hpp"
#include "shearflow/torus_field.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace shearflow {

using Point = std::array<double, 2>;

struct ChannelSnapshot;
struct TorusSnapshot;

/// Ordered velocity snapshots, linearly interpolated in time. Torus fields are
/// evaluated by their exact Fourier sum, channel fields by the Fourier sum in
/// x1 and a not-a-knot spline in x2.
class VelocityHistory {
public:
    using Callback = std::function<Point(double x1, double x2, double t)>;

    static VelocityHistory torus(std::vector<double> times, std::vector<TorusField> fields);
    static VelocityHistory channel(std::vector<double> times, std::vector<ChannelField> fields);
    static VelocityHistory from_torus_run(const std::vector<TorusSnapshot>& snaps);
    static VelocityHistory from_channel_run(const std::vector<ChannelSnapshot>& snaps);
    /// Closed-form velocity on [t0, t1] (tests and manufactured cases).
    static VelocityHistory analytic(Geometry geometry, Callback fn, double t0, double t1);
    /// SF2D series from a directory (all snapshots must share geometry and size).
    static VelocityHistory from_directory(const std::filesystem::path& dir);

    [[nodiscard]] Geometry geometry() const { return geometry_; }
    [[nodiscard]] double t_begin() const { return times_.front(); }
    [[nodiscard]] double t_end() const { return times_.back(); }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    /// Smallest spacing between consecutive snapshots (infinite for analytic histories).
    [[nodiscard]] double min_spacing() const;

    /// Throws InvalidInput for t outside the span. On the channel, |x2| > 1
    /// yields zero velocity and sets *clamped.
    [[nodiscard]] Point velocity(const Point& x, double t, bool* clamped = nullptr) const;

private:
    struct Sparse;
    Geometry geometry_ = Geometry::torus;
    std::vector<double> times_;
    std::vector<std::shared_ptr<const Sparse>> torus_;
    std::vector<std::shared_ptr<const ChannelField>> channel_;
    Callback analytic_;

    [[nodiscard]] Point evaluate(std::size_t index, const Point& x, bool* clamped) const;
};

struct BundleSpec {
    std::vector<Point> base_points;
    double eps = 0.0;    ///< satellite distance; 0 -> base points only
    int satellites = 4;  ///< per base point, evenly spaced on a circle
    double t0 = 0.0;
    double t1 = 1.0;
    int output_stride = 1; ///< record every n-th ODE step (the last step is always recorded)
};

struct TrajectoryBundle {
    Geometry geometry = Geometry::torus;
    double eps = 0.0;
    double dt_ode = 0.0;
    std::string interpolation;
    std::vector<int> group;          ///< base-point index of each path
    std::vector<double> times;
    std::vector<std::vector<Point>> paths;   ///< [path][sample], unwrapped on the torus
    std::vector<std::vector<Point>> wrapped; ///< torus: [0, 2pi)^2; channel: x1 in [-1, 1)
    int clamp_events = 0;
};

/// Initial points of a bundle: each base point followed by its satellites.
std::vector<Point> bundle_points(const BundleSpec& spec, std::vector<int>* group = nullptr);

/// Classical RK4 with step dt_ode (adjusted to divide t1 - t0 evenly).
/// Throws InvalidInput if dt_ode exceeds the snapshot spacing.
TrajectoryBundle trace(const VelocityHistory& history, const BundleSpec& spec, double dt_ode);

/// |X(t0) - X_back(t0)| per path after integrating t0 -> t1 -> t0.
std::vector<double> forward_backward_error(const VelocityHistory& history, const BundleSpec& spec, double dt_ode);

struct SeparationDiagnostics {
    std::vector<double> times;
    std::vector<double> separation;        ///< max over groups of the max pairwise distance
    std::vector<double> envelope;          ///< Osgood envelope with the fitted log-Lipschitz constant
    std::vector<double> lipschitz_envelope;///< s(0) exp(L t) with the fitted Lipschitz constant
    double log_lipschitz = 0.0;
    double lipschitz = 0.0;
    double worst_ratio = 0.0;              ///< max_t s(t) / envelope(t)
    [[nodiscard]] bool within(double margin) const { return worst_ratio <= margin; }
};

/// log+-modulus r (1 + log+(1/r)).
double log_lipschitz_modulus(double r);

/// Solution of s' = L s (1 + log+(1/s)), s(0) = s0.
double osgood_envelope(double s0, double L, double t);

/// Fits the moduli from velocity differences between paths of the same group
/// (least squares through the origin) and compares the separation with the
/// envelopes. Throws InvalidInput if no group has two paths.
SeparationDiagnostics separation_diagnostics(const TrajectoryBundle& bundle, const VelocityHistory& history);

/// Signed polygon area (counter-clockwise positive).
double shoelace_area(std::span<const Point> polygon);

/// Counter-clockwise points along the boundary of an axis-aligned square.
std::vector<Point> square_tracers(const Point& centre, double side, int per_edge);

} // namespace shearflow
