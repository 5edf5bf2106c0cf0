#include "shearflow/particles.hpp"

#include "shearflow/channel_solver.hpp"
#include "shearflow/errors.hpp"
#include "shearflow/parallel.hpp"
#include "shearflow/torus_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace shearflow {

/// Nonzero Fourier modes of a torus field (upper half plane, conjugates implied).
struct VelocityHistory::Sparse {
    struct Mode {
        int k1;
        int k2;
        Complex c1;
        Complex c2;
    };
    std::vector<Mode> modes;

    explicit Sparse(const TorusField& f) {
        const int n = f.resolution();
        const int band = n / 2 - 1;
        double scale = 0.0;
        for (int c = 0; c < 2; ++c) {
            for (const Complex& z : f.spectrum(c)) scale = std::max(scale, std::abs(z));
        }
        const double tiny = 1e-15 * scale;
        for (int k1 = 0; k1 <= band; ++k1) {
            for (int k2 = -band; k2 <= band; ++k2) {
                if (k1 == 0 && k2 <= 0) continue;
                const Complex a = f.coefficient(0, k1, k2);
                const Complex b = f.coefficient(1, k1, k2);
                if (std::abs(a) > tiny || std::abs(b) > tiny) {
                    modes.push_back({k1, k2, 2.0 * a, 2.0 * b});
                }
            }
        }
    }

    [[nodiscard]] Point eval(const Point& x) const {
        Point out{0.0, 0.0};
        for (const Mode& m : modes) {
            const Complex e = std::polar(1.0, m.k1 * x[0] + m.k2 * x[1]);
            out[0] += (m.c1 * e).real();
            out[1] += (m.c2 * e).real();
        }
        return out;
    }
};

namespace {

void check_times(const std::vector<double>& times, std::size_t fields) {
    if (times.empty() || times.size() != fields) {
        throw InvalidInput("velocity history: need one time per snapshot");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidInput("velocity history: times must be strictly increasing");
        }
    }
}

} // namespace

VelocityHistory VelocityHistory::torus(std::vector<double> times, std::vector<TorusField> fields) {
    check_times(times, fields.size());
    VelocityHistory h;
    h.geometry_ = Geometry::torus;
    h.times_ = std::move(times);
    for (const auto& f : fields) {
        if (f.resolution() != fields.front().resolution()) {
            throw InvalidInput("velocity history: inconsistent resolution");
        }
        h.torus_.push_back(std::make_shared<const Sparse>(f));
    }
    return h;
}

VelocityHistory VelocityHistory::channel(std::vector<double> times, std::vector<ChannelField> fields) {
    check_times(times, fields.size());
    VelocityHistory h;
    h.geometry_ = Geometry::channel;
    h.times_ = std::move(times);
    for (auto& f : fields) {
        if (f.n1() != fields.front().n1() || f.n2() != fields.front().n2()) {
            throw InvalidInput("velocity history: inconsistent resolution");
        }
        h.channel_.push_back(std::make_shared<const ChannelField>(std::move(f)));
    }
    return h;
}

VelocityHistory VelocityHistory::from_torus_run(const std::vector<TorusSnapshot>& snaps) {
    std::vector<double> t;
    std::vector<TorusField> f;
    for (const auto& s : snaps) {
        t.push_back(s.t);
        f.push_back(s.u);
    }
    return torus(std::move(t), std::move(f));
}

VelocityHistory VelocityHistory::from_channel_run(const std::vector<ChannelSnapshot>& snaps) {
    std::vector<double> t;
    std::vector<ChannelField> f;
    for (const auto& s : snaps) {
        t.push_back(s.t);
        f.push_back(s.u);
    }
    return channel(std::move(t), std::move(f));
}

VelocityHistory VelocityHistory::analytic(Geometry geometry, Callback fn, double t0, double t1) {
    if (!(t1 > t0)) {
        throw InvalidInput("velocity history: analytic span must have t1 > t0");
    }
    VelocityHistory h;
    h.geometry_ = geometry;
    h.times_ = {t0, t1};
    h.analytic_ = std::move(fn);
    return h;
}

VelocityHistory VelocityHistory::from_directory(const std::filesystem::path& dir) {
    const auto series = read_snapshot_series(dir);
    if (series.empty()) {
        throw InvalidInput("velocity history: no .sf2d snapshots in " + dir.string());
    }
    std::vector<double> times;
    for (const auto& s : series) {
        if (s.geometry != series.front().geometry) {
            throw InvalidInput("velocity history: mixed geometries in " + dir.string());
        }
        times.push_back(s.time);
    }
    if (series.front().geometry == Geometry::torus) {
        std::vector<TorusField> fields;
        for (const auto& s : series) fields.push_back(TorusField::from_grid(static_cast<int>(s.n1), s.u1, s.u2));
        return torus(std::move(times), std::move(fields));
    }
    std::vector<ChannelField> fields;
    for (const auto& s : series) {
        fields.push_back(ChannelField::from_nodes(static_cast<int>(s.n1), static_cast<int>(s.n2), s.u1, s.u2));
    }
    return channel(std::move(times), std::move(fields));
}

double VelocityHistory::min_spacing() const {
    if (analytic_) return std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < times_.size(); ++i) m = std::min(m, times_[i] - times_[i - 1]);
    return m;
}

Point VelocityHistory::evaluate(std::size_t index, const Point& x, bool* clamped) const {
    if (geometry_ == Geometry::torus) {
        return torus_[index]->eval(x);
    }
    const auto v = channel_[index]->evaluate(x[0], x[1], clamped);
    return {v[0], v[1]};
}

Point VelocityHistory::velocity(const Point& x, double t, bool* clamped) const {
    const double span = t_end() - t_begin();
    const double slack = 1e-12 * std::max(1.0, std::abs(span));
    if (!(t >= t_begin() - slack && t <= t_end() + slack)) {
        throw InvalidInput("velocity history: t = " + std::to_string(t) + " outside [" + std::to_string(t_begin())
                           + ", " + std::to_string(t_end()) + "]");
    }
    if (clamped) *clamped = false;
    if (analytic_) {
        if (geometry_ == Geometry::channel && !(std::abs(x[1]) <= 1.0)) {
            if (clamped) *clamped = true;
            return {0.0, 0.0};
        }
        return analytic_(x[0], x[1], t);
    }
    if (times_.size() == 1) {
        return evaluate(0, x, clamped);
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    hi = std::clamp<std::size_t>(hi, 1, times_.size() - 1);
    const std::size_t lo = hi - 1;
    const double theta = std::clamp((t - times_[lo]) / (times_[hi] - times_[lo]), 0.0, 1.0);
    const Point a = evaluate(lo, x, clamped);
    if (theta == 0.0) return a;
    const Point b = evaluate(hi, x, clamped);
    return {(1.0 - theta) * a[0] + theta * b[0], (1.0 - theta) * a[1] + theta * b[1]};
}

// ---------------------------------------------------------------------------

std::vector<Point> bundle_points(const BundleSpec& spec, std::vector<int>* group) {
    std::vector<Point> out;
    if (group) group->clear();
    const int sats = spec.eps > 0.0 ? spec.satellites : 0;
    for (std::size_t b = 0; b < spec.base_points.size(); ++b) {
        const Point& x = spec.base_points[b];
        out.push_back(x);
        if (group) group->push_back(static_cast<int>(b));
        for (int s = 0; s < sats; ++s) {
            const double angle = 2.0 * std::numbers::pi * s / sats;
            out.push_back({x[0] + spec.eps * std::cos(angle), x[1] + spec.eps * std::sin(angle)});
            if (group) group->push_back(static_cast<int>(b));
        }
    }
    return out;
}

namespace {

struct Integration {
    std::vector<double> times;
    std::vector<std::vector<Point>> paths;
    int clamps = 0;
};

Integration integrate(const VelocityHistory& history, const std::vector<Point>& start, double t0, double t1,
                      double dt_ode, int stride) {
    const double span = t1 - t0;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt_ode - 1e-9)));
    const double dt = span / steps;
    Integration out;
    for (int s = 0; s <= steps; ++s) {
        if (s % stride == 0 || s == steps) out.times.push_back(s == steps ? t1 : t0 + s * dt);
    }
    out.paths.assign(start.size(), {});
    std::vector<int> clamps(start.size(), 0);
    parallel_for(start.size(), [&](std::size_t p) {
        Point x = start[p];
        auto& path = out.paths[p];
        path.reserve(out.times.size());
        path.push_back(x);
        auto vel = [&](const Point& y, double t) {
            bool c = false;
            const Point v = history.velocity(y, t, &c);
            if (c) ++clamps[p];
            return v;
        };
        for (int s = 1; s <= steps; ++s) {
            const double t = t0 + (s - 1) * dt;
            const Point k1 = vel(x, t);
            const Point k2 = vel({x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]}, t + 0.5 * dt);
            const Point k3 = vel({x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]}, t + 0.5 * dt);
            const Point k4 = vel({x[0] + dt * k3[0], x[1] + dt * k3[1]}, t + dt);
            for (std::size_t c = 0; c < 2; ++c) {
                x[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            if (s % stride == 0 || s == steps) path.push_back(x);
        }
    });
    for (int c : clamps) out.clamps += c;
    return out;
}

Point wrap(Geometry g, const Point& x) {
    if (g == Geometry::torus) {
        const double period = 2.0 * std::numbers::pi;
        // Subtract an exact multiple of the period so wrapped - unwrapped is k * 2pi.
        return {x[0] - period * std::floor(x[0] / period), x[1] - period * std::floor(x[1] / period)};
    }
    return {x[0] - 2.0 * std::floor((x[0] + 1.0) / 2.0), x[1]};
}

void check_dt(const VelocityHistory& history, double dt_ode, const BundleSpec& spec) {
    if (!(dt_ode > 0.0)) throw InvalidInput("trace: dt_ode must be > 0");
    if (dt_ode > history.min_spacing() * (1.0 + 1e-12)) {
        throw InvalidInput("trace: dt_ode exceeds the snapshot spacing");
    }
    if (!(spec.t1 > spec.t0)) throw InvalidInput("trace: need t1 > t0");
    if (spec.output_stride < 1) throw InvalidInput("trace: output_stride must be >= 1");
    if (spec.base_points.empty()) throw InvalidInput("trace: no base points");
}

} // namespace

TrajectoryBundle trace(const VelocityHistory& history, const BundleSpec& spec, double dt_ode) {
    check_dt(history, dt_ode, spec);
    TrajectoryBundle b;
    b.geometry = history.geometry();
    b.eps = spec.eps;
    b.interpolation = history.geometry() == Geometry::torus ? "spectral" : "fourier-spline";
    const auto start = bundle_points(spec, &b.group);
    Integration run = integrate(history, start, spec.t0, spec.t1, dt_ode, spec.output_stride);
    const int steps = std::max(1, static_cast<int>(std::ceil((spec.t1 - spec.t0) / dt_ode - 1e-9)));
    b.dt_ode = (spec.t1 - spec.t0) / steps;
    b.times = std::move(run.times);
    b.paths = std::move(run.paths);
    b.clamp_events = run.clamps;
    for (std::size_t p = 0; p < b.paths.size(); ++p) {
        b.paths[p].front() = start[p];
        std::vector<Point> w;
        w.reserve(b.paths[p].size());
        for (const auto& x : b.paths[p]) w.push_back(wrap(b.geometry, x));
        b.wrapped.push_back(std::move(w));
    }
    return b;
}

std::vector<double> forward_backward_error(const VelocityHistory& history, const BundleSpec& spec, double dt_ode) {
    check_dt(history, dt_ode, spec);
    const auto start = bundle_points(spec);
    const Integration fwd = integrate(history, start, spec.t0, spec.t1, dt_ode, 1 << 30);
    std::vector<Point> end;
    for (const auto& p : fwd.paths) end.push_back(p.back());
    const Integration back = integrate(history, end, spec.t1, spec.t0, dt_ode, 1 << 30);
    std::vector<double> err;
    for (std::size_t p = 0; p < start.size(); ++p) {
        const Point& x = back.paths[p].back();
        err.push_back(std::hypot(x[0] - start[p][0], x[1] - start[p][1]));
    }
    return err;
}

double log_lipschitz_modulus(double r) { return r <= 0.0 ? 0.0 : r * (1.0 + std::max(0.0, std::log(1.0 / r))); }

double osgood_envelope(double s0, double L, double t) {
    if (s0 <= 0.0) return 0.0;
    if (s0 >= 1.0) return s0 * std::exp(L * t);
    if (L == 0.0) return s0;
    // Below 1: log s = 1 - (1 - log s0) exp(-L t), until s reaches 1.
    const double t1 = std::log(1.0 - std::log(s0)) / L;
    if (t <= t1) return std::exp(1.0 - (1.0 - std::log(s0)) * std::exp(-L * t));
    return std::exp(L * (t - t1));
}

SeparationDiagnostics separation_diagnostics(const TrajectoryBundle& bundle, const VelocityHistory& history) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t p = 0; p < bundle.group.size(); ++p) {
        const auto g = static_cast<std::size_t>(bundle.group[p]);
        if (groups.size() <= g) groups.resize(g + 1);
        groups[g].push_back(p);
    }
    bool any_pair = false;
    for (const auto& g : groups) any_pair = any_pair || g.size() >= 2;
    if (!any_pair) {
        throw InvalidInput("separation_diagnostics: need at least one group with two paths");
    }
    SeparationDiagnostics out;
    out.times = bundle.times;
    double sxy_log = 0.0, sxx_log = 0.0, sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < bundle.times.size(); ++i) {
        double s = 0.0;
        for (const auto& g : groups) {
            std::vector<Point> vel;
            for (std::size_t p : g) vel.push_back(history.velocity(bundle.paths[p][i], bundle.times[i]));
            for (std::size_t a = 0; a < g.size(); ++a) {
                for (std::size_t b = a + 1; b < g.size(); ++b) {
                    const Point& xa = bundle.paths[g[a]][i];
                    const Point& xb = bundle.paths[g[b]][i];
                    const double r = std::hypot(xa[0] - xb[0], xa[1] - xb[1]);
                    s = std::max(s, r);
                    const double du = std::hypot(vel[a][0] - vel[b][0], vel[a][1] - vel[b][1]);
                    const double phi = log_lipschitz_modulus(r);
                    sxy_log += phi * du;
                    sxx_log += phi * phi;
                    sxy += r * du;
                    sxx += r * r;
                }
            }
        }
        out.separation.push_back(s);
    }
    out.log_lipschitz = sxx_log > 0.0 ? sxy_log / sxx_log : 0.0;
    out.lipschitz = sxx > 0.0 ? sxy / sxx : 0.0;
    const double s0 = out.separation.front();
    const double t0 = bundle.times.front();
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        const double dt = out.times[i] - t0;
        const double env = osgood_envelope(s0, out.log_lipschitz, dt);
        out.envelope.push_back(env);
        out.lipschitz_envelope.push_back(s0 * std::exp(out.lipschitz * dt));
        double ratio;
        if (env > 0.0) {
            ratio = out.separation[i] / env;
        } else {
            ratio = out.separation[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
        out.worst_ratio = std::max(out.worst_ratio, ratio);
    }
    return out;
}

double shoelace_area(std::span<const Point> polygon) {
    double a = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = polygon[i];
        const Point& q = polygon[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

std::vector<Point> square_tracers(const Point& centre, double side, int per_edge) {
    if (per_edge < 1) throw InvalidInput("square_tracers: per_edge must be >= 1");
    const double h = 0.5 * side;
    const Point corners[4] = {{centre[0] - h, centre[1] - h},
                              {centre[0] + h, centre[1] - h},
                              {centre[0] + h, centre[1] + h},
                              {centre[0] - h, centre[1] + h}};
    std::vector<Point> out;
    for (int e = 0; e < 4; ++e) {
        const Point& a = corners[e];
        const Point& b = corners[(e + 1) % 4];
        for (int k = 0; k < per_edge; ++k) {
            const double s = static_cast<double>(k) / per_edge;
            out.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
        }
    }
    return out;
}

} // namespace shearflow
