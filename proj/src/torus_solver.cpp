#include "shearflow/torus_solver.hpp"

#include "shearflow/errors.hpp"
#include "shearflow/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shearflow {

TimeScheme parse_time_scheme(const std::string& name) {
    if (name == "imex-cn-ab2") return TimeScheme::imex_cn_ab2;
    if (name == "imex-euler") return TimeScheme::imex_euler;
    if (name == "rk3-fully-explicit") return TimeScheme::rk3_explicit;
    throw InvalidInput("unknown time scheme '" + name + "' (expected imex-cn-ab2, imex-euler or rk3-fully-explicit)");
}

std::string to_string(TimeScheme scheme) {
    switch (scheme) {
    case TimeScheme::imex_cn_ab2: return "imex-cn-ab2";
    case TimeScheme::imex_euler: return "imex-euler";
    case TimeScheme::rk3_explicit: return "rk3-fully-explicit";
    }
    return "imex-cn-ab2";
}

void SolverConfig::validate(const StressParams& params) const {
    std::ostringstream msg;
    if (!(dt > 0.0) || !std::isfinite(dt)) msg << "dt must be > 0; ";
    if (!(T >= 0.0) || !std::isfinite(T)) msg << "T must be >= 0; ";
    if (monitor_stride < 1) msg << "monitor_stride must be >= 1; ";
    if (snapshot_stride < 0) msg << "snapshot_stride must be >= 0; ";
    if (params.nu0 == 0.0 && scheme != TimeScheme::rk3_explicit) {
        msg << "nu0 = 0 requires scheme rk3-fully-explicit; ";
    }
    if (stabilization && !(*stabilization >= 0.0)) msg << "stabilization must be >= 0; ";
    const std::string s = msg.str();
    if (!s.empty()) {
        throw InvalidInput("invalid solver config: " + s.substr(0, s.size() - 2));
    }
    params.validate(scheme == TimeScheme::rk3_explicit);
}

int SolverConfig::step_count() const {
    if (T == 0.0) {
        return 0;
    }
    return std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
}

// ---------------------------------------------------------------------------
// Forcing

TorusForcing TorusForcing::steady(TorusField f) {
    TorusForcing out;
    out.kind_ = Kind::steady;
    out.fields_ = std::make_shared<const std::vector<TorusField>>(std::vector<TorusField>{std::move(f)});
    return out;
}

TorusForcing TorusForcing::analytic(Callback cb, bool time_dependent) {
    TorusForcing out;
    out.kind_ = Kind::analytic;
    out.callback_ = std::move(cb);
    out.time_dependent_ = time_dependent;
    return out;
}

TorusForcing TorusForcing::series(std::vector<double> times, std::vector<TorusField> fields) {
    if (times.empty() || times.size() != fields.size()) {
        throw InvalidInput("forcing series: need one time per field");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidInput("forcing series: times must be strictly increasing");
        }
    }
    TorusForcing out;
    out.kind_ = Kind::series;
    out.time_dependent_ = true;
    out.times_ = std::make_shared<const std::vector<double>>(std::move(times));
    out.fields_ = std::make_shared<const std::vector<TorusField>>(std::move(fields));
    return out;
}

namespace {

/// Copy the overlapping band of modes into a field of resolution n.
TorusField resample(const TorusField& f, int n) {
    if (f.resolution() == n) {
        return f;
    }
    TorusField out(n);
    const int band = std::min(f.resolution(), n) / 2 - 1;
    for (int k1 = 0; k1 <= band; ++k1) {
        for (int k2 = -band; k2 <= band; ++k2) {
            if ((k1 == 0 && k2 <= 0)) {
                continue;
            }
            for (int c = 0; c < 2; ++c) {
                const Complex v = f.coefficient(c, k1, k2);
                if (v != Complex{}) {
                    out.set_coefficient(c, k1, k2, v);
                }
            }
        }
    }
    return out;
}

TorusField sample_field(int n, const std::function<std::array<double, 2>(double, double)>& fn) {
    const auto size = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    std::vector<double> u1(size), u2(size);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto v = fn(kTwoPi * i / n, kTwoPi * j / n);
            u1[static_cast<std::size_t>(j * n + i)] = v[0];
            u2[static_cast<std::size_t>(j * n + i)] = v[1];
        }
    }
    return TorusField::from_grid(n, u1, u2);
}

} // namespace

TorusField TorusForcing::at(double t, int n) const {
    switch (kind_) {
    case Kind::zero: return TorusField(n);
    case Kind::steady: return resample(fields_->front(), n);
    case Kind::analytic:
        return sample_field(n, [&](double x1, double x2) { return callback_(x1, x2, t); });
    case Kind::series: {
        const auto& ts = *times_;
        const auto& fs = *fields_;
        if (t <= ts.front()) return resample(fs.front(), n);
        if (t >= ts.back()) return resample(fs.back(), n);
        const auto it = std::upper_bound(ts.begin(), ts.end(), t);
        const auto hi = static_cast<std::size_t>(it - ts.begin());
        const double theta = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
        return resample((1.0 - theta) * fs[hi - 1] + theta * fs[hi], n);
    }
    }
    return TorusField(n);
}

// ---------------------------------------------------------------------------
// Initial data

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform [0,1) value attached to a wavevector, independent of resolution.
double mode_uniform(std::uint64_t seed, int k1, int k2) {
    const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k1 + 65536)) << 32)
        | static_cast<std::uint32_t>(k2 + 65536);
    const std::uint64_t h = splitmix64(seed ^ splitmix64(key));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double spectral_l2(const TorusField& u) { return sobolev_norm(u, 0, 2.0, NormMethod::parseval); }

} // namespace

TorusInitialData make_initial_field(const TorusInitialSpec& spec, int n, int cutoff, std::uint64_t seed) {
    TorusInitialData out{TorusField(n), 0.0, {}};
    TorusField raw(n);
    const double a = spec.amplitude;
    switch (spec.kind) {
    case TorusInitialSpec::Kind::zero: break;
    case TorusInitialSpec::Kind::taylor_green:
        raw = sample_field(n, [a](double x1, double x2) {
            return std::array<double, 2>{a * std::sin(x1) * std::cos(x2), -a * std::cos(x1) * std::sin(x2)};
        });
        break;
    case TorusInitialSpec::Kind::shear: {
        const int k = spec.wavenumber;
        raw = sample_field(n, [a, k](double, double x2) { return std::array<double, 2>{a * std::sin(k * x2), 0.0}; });
        break;
    }
    case TorusInitialSpec::Kind::modes:
        raw = sample_field(n, [&spec, a](double x1, double x2) {
            std::array<double, 2> v{0.0, 0.0};
            for (const auto& m : spec.modes) {
                const double phase = m.k1 * x1 + m.k2 * x2;
                for (std::size_t c = 0; c < 2; ++c) {
                    v[c] += a * (m.sin_amp[c] * std::sin(phase) + m.cos_amp[c] * std::cos(phase));
                }
            }
            return v;
        });
        break;
    case TorusInitialSpec::Kind::spectrum: {
        // Shell amplitude ~ |k|^-alpha: per-mode amplitude |k|^(-alpha - 1/2),
        // direction perpendicular to k, phase drawn per wavevector.
        const int band = std::min(cutoff, n / 2 - 1);
        for (int k1 = 0; k1 <= band; ++k1) {
            for (int k2 = -band; k2 <= band; ++k2) {
                if (k1 == 0 && k2 <= 0) {
                    continue;
                }
                const double kn = std::hypot(double(k1), double(k2));
                const double amp = a * std::pow(kn, -spec.alpha - 0.5);
                const Complex z = std::polar(amp, kTwoPi * mode_uniform(seed, k1, k2));
                raw.set_coefficient(0, k1, k2, z * (-k2 / kn));
                raw.set_coefficient(1, k1, k2, z * (k1 / kn));
            }
        }
        break;
    }
    case TorusInitialSpec::Kind::snapshot: {
        const SnapshotData snap = read_snapshot(spec.path);
        if (snap.geometry != Geometry::torus) {
            throw InvalidInput("initial snapshot " + spec.path + " is not a torus snapshot");
        }
        const auto src = TorusField::from_grid(static_cast<int>(snap.n1), snap.u1, snap.u2);
        raw = resample(src, n);
        break;
    }
    }
    raw.truncate(cutoff);
    const TorusField projected = leray_project(raw);
    const double norm = spectral_l2(raw);
    out.projection_defect = norm > 0.0 ? spectral_l2(raw - projected) / norm : 0.0;
    if (out.projection_defect > 1e-12) {
        std::ostringstream msg;
        msg << "initial velocity was not divergence-free; projected (relative defect " << out.projection_defect << ")";
        out.warnings.push_back(msg.str());
    }
    out.u = projected;
    return out;
}

// ---------------------------------------------------------------------------
// Stepping

double automatic_stabilization(const StressParams& params, const TorusField& u0, TimeScheme scheme) {
    if (scheme == TimeScheme::rk3_explicit || params.nu1 == 0.0) {
        return 0.0;
    }
    if (params.p == 2.0) {
        return 1.0;
    }
    if (params.delta > 0.0) {
        return std::pow(params.delta, params.p - 2.0);
    }
    const TensorFieldGrid d = sym_grad(u0);
    double max_norm = 0.0;
    for (std::size_t i = 0; i < d.d11.size(); ++i) {
        max_norm = std::max(max_norm, d.at(i).frobenius_norm());
    }
    return max_norm > 0.0 ? std::pow(0.1 * max_norm, params.p - 2.0) : 1.0;
}

TorusSolverState init_torus(const TorusField& u0, const SolverConfig& config, const StressParams& params,
                            TorusForcing forcing) {
    config.validate(params);
    TorusSolverState s;
    s.u = leray_project(u0);
    s.cutoff = galerkin_cutoff(u0.resolution());
    s.u.truncate(s.cutoff);
    s.params = params;
    s.sigma = config.stabilization.value_or(automatic_stabilization(params, s.u, config.scheme));
    if (config.scheme == TimeScheme::rk3_explicit) {
        s.sigma = 0.0;
    }
    s.forcing = std::move(forcing);
    return s;
}

double cfl_number(const TorusField& u, double dt) {
    double umax = 0.0;
    const auto& u1 = u.grid(0);
    const auto& u2 = u.grid(1);
    for (std::size_t i = 0; i < u1.size(); ++i) {
        umax = std::max(umax, std::hypot(u1[i], u2[i]));
    }
    return umax * dt / (kTwoPi / u.resolution());
}

namespace {

using Spectrum = std::array<std::vector<Complex>, 2>;

/// nu1 (div S(Du) + sigma/2 |k|^2 u) - (u.grad)u + P f, projected and truncated.
Spectrum explicit_rhs(const TorusSolverState& s, const TorusField& u, double t) {
    const int n = u.resolution();
    const int cols = n / 2 + 1;
    Spectrum out{std::vector<Complex>(u.spectral_size()), std::vector<Complex>(u.spectral_size())};
    if (s.params.nu1 != 0.0 && !(s.params.p == 2.0 && s.sigma == 1.0)) {
        const auto sdiv = stress_divergence(u, s.params, s.cutoff);
        for (int j = 0; j < n; ++j) {
            const double k2 = wavenumber(j, n);
            for (int i = 0; i < cols; ++i) {
                const auto idx = static_cast<std::size_t>(j * cols + i);
                const double kk = double(i) * i + k2 * k2;
                for (std::size_t c = 0; c < 2; ++c) {
                    out[c][idx] += s.params.nu1 * (sdiv[c][idx] + 0.5 * s.sigma * kk * u.spectrum(static_cast<int>(c))[idx]);
                }
            }
        }
    }
    const auto conv = convection(u, s.cutoff);
    const bool forced = !s.forcing.is_zero();
    const TorusField f = forced ? s.forcing.at(t, n) : TorusField(n);
    for (std::size_t c = 0; c < 2; ++c) {
        const auto fc = f.spectrum(static_cast<int>(c));
        for (std::size_t idx = 0; idx < out[c].size(); ++idx) {
            out[c][idx] += -conv[c][idx] + (forced ? fc[idx] : Complex{});
        }
    }
    TorusField tmp(n);
    std::copy(out[0].begin(), out[0].end(), tmp.spectrum_mut(0).begin());
    std::copy(out[1].begin(), out[1].end(), tmp.spectrum_mut(1).begin());
    tmp = leray_project(tmp);
    tmp.truncate(s.cutoff);
    return {std::vector<Complex>(tmp.spectrum(0).begin(), tmp.spectrum(0).end()),
            std::vector<Complex>(tmp.spectrum(1).begin(), tmp.spectrum(1).end())};
}

/// u + dt * (explicit rhs - nu0 |k|^2 u) for the fully explicit scheme.
TorusField explicit_euler_stage(const TorusSolverState& s, const TorusField& u, double t, double dt) {
    const int n = u.resolution();
    const int cols = n / 2 + 1;
    const Spectrum rhs = explicit_rhs(s, u, t);
    TorusField out(u);
    for (std::size_t c = 0; c < 2; ++c) {
        auto dst = out.spectrum_mut(static_cast<int>(c));
        for (int j = 0; j < n; ++j) {
            const double k2 = wavenumber(j, n);
            for (int i = 0; i < cols; ++i) {
                const auto idx = static_cast<std::size_t>(j * cols + i);
                const double kk = double(i) * i + k2 * k2;
                dst[idx] += dt * (rhs[c][idx] - s.params.nu0 * kk * dst[idx]);
            }
        }
    }
    return out;
}

bool all_finite(const TorusField& u) {
    for (int c = 0; c < 2; ++c) {
        for (const Complex& v : u.spectrum(c)) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

void step(TorusSolverState& state, double dt, TimeScheme scheme, DiffusionMode diffusion, double cfl_limit) {
    if (!(dt > 0.0)) {
        throw InvalidInput("step: dt must be > 0");
    }
    const double cfl = cfl_number(state.u, dt);
    if (cfl > cfl_limit) {
        std::ostringstream msg;
        msg << "step rejected: CFL number " << cfl << " exceeds " << cfl_limit << " at t = " << state.t;
        throw NumericalFailure(msg.str());
    }
    const int n = state.u.resolution();
    const int cols = n / 2 + 1;
    TorusField next(n);

    if (scheme == TimeScheme::rk3_explicit) {
        const double t = state.t;
        const TorusField u1 = explicit_euler_stage(state, state.u, t, dt);
        const TorusField u2 = 0.75 * state.u + 0.25 * explicit_euler_stage(state, u1, t + dt, dt);
        next = (1.0 / 3.0) * state.u + (2.0 / 3.0) * explicit_euler_stage(state, u2, t + 0.5 * dt, dt);
        next.truncate(state.cutoff);
        next = leray_project(next);
        state.has_previous = false;
    } else {
        const Spectrum rhs = explicit_rhs(state, state.u, state.t);
        const bool ab2 = scheme == TimeScheme::imex_cn_ab2 && state.has_previous && state.previous_dt == dt;
        const double nu_lin = state.params.nu0 + 0.5 * state.params.nu1 * state.sigma;
        for (std::size_t c = 0; c < 2; ++c) {
            const auto uc = state.u.spectrum(static_cast<int>(c));
            auto dst = next.spectrum_mut(static_cast<int>(c));
            for (int j = 0; j < n; ++j) {
                const double k2 = wavenumber(j, n);
                for (int i = 0; i < cols; ++i) {
                    const auto idx = static_cast<std::size_t>(j * cols + i);
                    const double lam = nu_lin * (double(i) * i + k2 * k2);
                    if (diffusion == DiffusionMode::integrating_factor) {
                        const double e = std::exp(-lam * dt);
                        if (ab2) {
                            dst[idx] = e * uc[idx] + dt * (1.5 * e * rhs[c][idx] - 0.5 * e * e * state.previous_rhs[c][idx]);
                        } else {
                            dst[idx] = e * (uc[idx] + dt * rhs[c][idx]);
                        }
                    } else if (ab2) {
                        dst[idx] = ((1.0 - 0.5 * lam * dt) * uc[idx] + dt * (1.5 * rhs[c][idx] - 0.5 * state.previous_rhs[c][idx]))
                            / (1.0 + 0.5 * lam * dt);
                    } else {
                        dst[idx] = (uc[idx] + dt * rhs[c][idx]) / (1.0 + lam * dt);
                    }
                }
            }
        }
        next.truncate(state.cutoff);
        if (!all_finite(next)) {
            throw NumericalFailure("step produced non-finite values at t = " + std::to_string(state.t));
        }
        state.previous_rhs = rhs;
        state.has_previous = true;
        state.previous_dt = dt;
    }
    if (!all_finite(next)) {
        throw NumericalFailure("step produced non-finite values at t = " + std::to_string(state.t));
    }
    state.u = std::move(next);
    state.t += dt;
    ++state.step_index;
}

// ---------------------------------------------------------------------------
// Run loop

namespace {

void add_monitor_sample(ReportBuilder& builder, const TorusSolverState& s, const TorusField* ut) {
    const PointwiseState pw = torus_pointwise(s.u);
    std::optional<PointwiseState> pw_t;
    if (ut) {
        pw_t = torus_pointwise(*ut, false);
    }
    if (s.forcing.is_zero()) {
        builder.add_sample(s.t, pw, pw_t ? &*pw_t : nullptr, {}, {});
        return;
    }
    const TorusField f = leray_project(s.forcing.at(s.t, s.u.resolution()));
    builder.add_sample(s.t, pw, pw_t ? &*pw_t : nullptr, f.grid(0), f.grid(1));
}

} // namespace

TorusRunResult run_torus(const SolverConfig& config, const StressParams& params, const TorusField& u0,
                         TorusForcing forcing) {
    TorusRunResult result;
    TorusSolverState state = init_torus(u0, config, params, std::move(forcing));
    const int steps = config.step_count();
    const double dt = steps > 0 ? config.T / steps : config.dt;

    ReportBuilder builder(params);
    add_monitor_sample(builder, state, nullptr);
    result.snapshots.push_back({state.t, state.u});

    for (int s = 1; s <= steps; ++s) {
        const TorusField previous = state.u;
        try {
            step(state, dt, config.scheme, config.diffusion, config.cfl_limit);
        } catch (const NumericalFailure& e) {
            result.failure = e.what();
            break;
        }
        // Exact end time without accumulated round-off.
        if (s == steps) {
            state.t = config.T;
        }
        if (s % config.monitor_stride == 0 || s == steps) {
            const TorusField ut = (1.0 / dt) * (state.u - previous);
            add_monitor_sample(builder, state, &ut);
        }
        if ((config.snapshot_stride > 0 && s % config.snapshot_stride == 0) || s == steps) {
            result.snapshots.push_back({state.t, state.u});
        }
    }
    result.report = builder.take();
    return result;
}

TorusRunResult run_torus(const SolverConfig& config, const StressParams& params, const TorusInitialSpec& u0,
                         int n, TorusForcing forcing) {
    const TorusInitialData init = make_initial_field(u0, n, galerkin_cutoff(n), config.seed);
    TorusRunResult result = run_torus(config, params, init.u, std::move(forcing));
    result.projection_defect = init.projection_defect;
    result.warnings = init.warnings;
    return result;
}

} // namespace shearflow
