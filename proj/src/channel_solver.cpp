#include "shearflow/channel_solver.hpp"

#include "shearflow/channel_diagnostics.hpp"
#include "shearflow/errors.hpp"
#include "shearflow/fft.hpp"
#include "shearflow/parallel.hpp"
#include "shearflow/snapshot.hpp"
#include "shearflow/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace shearflow {

using Spectra = std::array<std::vector<Complex>, 2>;

// ---------------------------------------------------------------------------
// Forcing

ChannelForcing ChannelForcing::constant(double f1, double f2) {
    return analytic([f1, f2](double, double, double) { return std::array<double, 2>{f1, f2}; }, false);
}

ChannelForcing ChannelForcing::analytic(Callback cb, bool time_dependent) {
    ChannelForcing out;
    out.kind_ = Kind::analytic;
    out.callback_ = std::move(cb);
    out.time_dependent_ = time_dependent;
    return out;
}

ChannelForcing ChannelForcing::steady(ChannelField f) {
    ChannelForcing out;
    out.kind_ = Kind::steady;
    out.field_ = std::make_shared<const ChannelField>(std::move(f));
    return out;
}

std::array<std::vector<double>, 2> ChannelForcing::nodes(const ChannelField& like, double t) const {
    const int n1 = like.n1();
    const int n2 = like.n2();
    const auto size = static_cast<std::size_t>((n2 + 1) * n1);
    std::array<std::vector<double>, 2> out{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)};
    switch (kind_) {
    case Kind::zero: break;
    case Kind::analytic:
        for (int j = 0; j <= n2; ++j) {
            for (int i = 0; i < n1; ++i) {
                const auto v = callback_(like.x1(i), like.x2(j), t);
                out[0][static_cast<std::size_t>(j * n1 + i)] = v[0];
                out[1][static_cast<std::size_t>(j * n1 + i)] = v[1];
            }
        }
        break;
    case Kind::steady:
        if (field_->n1() != n1 || field_->n2() != n2) {
            throw InvalidInput("channel forcing field does not match the grid");
        }
        out[0] = field_->nodes(0);
        out[1] = field_->nodes(1);
        break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Initial data

ChannelInitialData make_channel_initial(const ChannelInitialSpec& spec, int n1, int n2) {
    ChannelField probe(n1, n2);
    const auto size = static_cast<std::size_t>((n2 + 1) * n1);
    std::vector<double> u1(size, 0.0), u2(size, 0.0);
    const double a = spec.amplitude;
    const double k = spec.wavenumber;
    const double pi = std::numbers::pi;
    if (spec.kind == ChannelInitialSpec::Kind::snapshot) {
        const SnapshotData snap = read_snapshot(spec.path);
        if (snap.geometry != Geometry::channel || static_cast<int>(snap.n1) != n1 || static_cast<int>(snap.n2) != n2) {
            throw InvalidInput("initial snapshot " + spec.path + " is not a channel snapshot of size "
                               + std::to_string(n1) + " x " + std::to_string(n2));
        }
        u1 = snap.u1;
        u2 = snap.u2;
    } else {
        for (int j = 0; j <= n2; ++j) {
            const double y = probe.x2(j);
            for (int i = 0; i < n1; ++i) {
                const double x = probe.x1(i);
                const auto idx = static_cast<std::size_t>(j * n1 + i);
                switch (spec.kind) {
                case ChannelInitialSpec::Kind::poiseuille: u1[idx] = a * (1.0 - y * y); break;
                case ChannelInitialSpec::Kind::stokes_mode: u1[idx] = a * std::sin(k * pi * y); break;
                case ChannelInitialSpec::Kind::stream:
                    // psi = a (1 - x2^2)^2 sin(k pi x1); u = (d2 psi, -d1 psi)
                    u1[idx] = -4.0 * a * y * (1.0 - y * y) * std::sin(k * pi * x);
                    u2[idx] = -a * (1.0 - y * y) * (1.0 - y * y) * k * pi * std::cos(k * pi * x);
                    break;
                default: break;
                }
            }
        }
    }
    ChannelInitialData out;
    out.u = ChannelField::from_nodes(n1, n2, u1, u2);
    out.u.truncate(n1 / 3);
    out.projection_defect = channel_project(out.u);
    if (out.projection_defect > 1e-12) {
        std::ostringstream msg;
        msg << "initial velocity was not discretely divergence-free; projected (divergence L2 " << out.projection_defect
            << ")";
        out.warnings.push_back(msg.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Operators

namespace {

std::vector<double> to_physical(int n1, int rows, std::span<const Complex> s) {
    std::vector<double> out(static_cast<std::size_t>(rows * n1));
    fft::PlanRows::get(n1, rows).inverse(s, out);
    return out;
}

std::vector<Complex> to_spectral(int n1, int rows, std::span<const double> v, int cutoff) {
    const int cols = n1 / 2 + 1;
    std::vector<Complex> out(static_cast<std::size_t>(rows * cols));
    fft::PlanRows::get(n1, rows).forward(v, out);
    for (int j = 0; j < rows; ++j) {
        for (int k = cutoff + 1; k < cols; ++k) {
            out[static_cast<std::size_t>(j * cols + k)] = Complex{};
        }
    }
    return out;
}

Complex ik(const ChannelField& u, int k) { return {0.0, u.kappa(k)}; }

} // namespace

std::array<std::vector<Complex>, 2> channel_stress_divergence(const ChannelField& u, const StressParams& params, int cutoff) {
    const int n1 = u.n1();
    const int n2 = u.n2();
    const int cols = u.cols();
    const double h = u.h2();
    // Du at the cell centres.
    std::array<std::vector<Complex>, 4> grad; // d1u1, d2u1, d1u2, d2u2
    for (auto& g : grad) g.assign(static_cast<std::size_t>(n2 * cols), Complex{});
    for (int c = 0; c < 2; ++c) {
        const auto s = u.spectrum(c);
        for (int j = 0; j < n2; ++j) {
            for (int k = 0; k < cols; ++k) {
                const auto lo = static_cast<std::size_t>(j * cols + k);
                const auto hi = static_cast<std::size_t>((j + 1) * cols + k);
                grad[static_cast<std::size_t>(2 * c)][lo] = ik(u, k) * 0.5 * (s[lo] + s[hi]);
                grad[static_cast<std::size_t>(2 * c + 1)][lo] = (s[hi] - s[lo]) / h;
            }
        }
    }
    std::array<std::vector<double>, 4> g;
    for (std::size_t q = 0; q < 4; ++q) g[q] = to_physical(n1, n2, grad[q]);
    const auto size = static_cast<std::size_t>(n2 * n1);
    std::vector<double> s11(size), s12(size), s22(size);
    for (std::size_t i = 0; i < size; ++i) {
        const SymTensor2 d{g[0][i], 0.5 * (g[1][i] + g[2][i]), g[3][i]};
        const SymTensor2 s = stress(d, params);
        s11[i] = s.d11;
        s12[i] = s.d12;
        s22[i] = s.d22;
    }
    const auto h11 = to_spectral(n1, n2, s11, cutoff);
    const auto h12 = to_spectral(n1, n2, s12, cutoff);
    const auto h22 = to_spectral(n1, n2, s22, cutoff);
    Spectra out{std::vector<Complex>(u.spectrum(0).size()), std::vector<Complex>(u.spectrum(0).size())};
    for (int j = 1; j < n2; ++j) {
        for (int k = 0; k < cols; ++k) {
            const auto below = static_cast<std::size_t>((j - 1) * cols + k);
            const auto above = static_cast<std::size_t>(j * cols + k);
            const auto node = static_cast<std::size_t>(j * cols + k);
            out[0][node] = ik(u, k) * 0.5 * (h11[below] + h11[above]) + (h12[above] - h12[below]) / h;
            out[1][node] = ik(u, k) * 0.5 * (h12[below] + h12[above]) + (h22[above] - h22[below]) / h;
        }
    }
    return out;
}

namespace {

/// (u.grad) u at the nodes, centred in x2, truncated in x1; walls zero.
Spectra channel_convection(const ChannelField& u, int cutoff) {
    const PointwiseState s = channel_pointwise(u, false);
    const int n1 = u.n1();
    const int n2 = u.n2();
    const int cols = u.cols();
    Spectra out;
    for (std::size_t c = 0; c < 2; ++c) {
        std::vector<double> v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            v[i] = s.u[0][i] * s.grad[2 * c][i] + s.u[1][i] * s.grad[2 * c + 1][i];
        }
        out[c] = to_spectral(n1, n2 + 1, v, cutoff);
        std::fill_n(out[c].begin(), cols, Complex{});
        std::fill_n(out[c].begin() + static_cast<std::ptrdiff_t>(n2 * cols), cols, Complex{});
    }
    return out;
}

/// Discrete Laplacian per mode at interior nodes.
Spectra laplacian(const ChannelField& u) {
    const int n2 = u.n2();
    const int cols = u.cols();
    const double ih2 = 1.0 / (u.h2() * u.h2());
    Spectra out;
    for (std::size_t c = 0; c < 2; ++c) {
        const auto s = u.spectrum(static_cast<int>(c));
        out[c].assign(s.size(), Complex{});
        for (int j = 1; j < n2; ++j) {
            for (int k = 0; k < cols; ++k) {
                const auto idx = static_cast<std::size_t>(j * cols + k);
                const double kk = u.kappa(k) * u.kappa(k);
                out[c][idx] = (s[idx + static_cast<std::size_t>(cols)] - 2.0 * s[idx] + s[idx - static_cast<std::size_t>(cols)]) * ih2
                    - kk * s[idx];
            }
        }
    }
    return out;
}

Spectra explicit_rhs(const ChannelSolverState& st, double t) {
    const ChannelField& u = st.u;
    const int n1 = u.n1();
    const int n2 = u.n2();
    const int cols = u.cols();
    Spectra out{std::vector<Complex>(u.spectrum(0).size()), std::vector<Complex>(u.spectrum(0).size())};
    if (st.params.nu1 != 0.0 && !(st.params.p == 2.0 && st.sigma == 1.0)) {
        const auto sdiv = channel_stress_divergence(u, st.params, st.cutoff);
        const auto lap = laplacian(u);
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < out[c].size(); ++i) {
                out[c][i] += st.params.nu1 * (sdiv[c][i] - 0.5 * st.sigma * lap[c][i]);
            }
        }
    }
    const auto conv = channel_convection(u, st.cutoff);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < out[c].size(); ++i) out[c][i] -= conv[c][i];
    }
    if (!st.forcing.is_zero()) {
        const auto f = st.forcing.nodes(u, t);
        for (std::size_t c = 0; c < 2; ++c) {
            auto fs = to_spectral(n1, n2 + 1, f[c], st.cutoff);
            for (int j = 1; j < n2; ++j) {
                for (int k = 0; k < cols; ++k) {
                    const auto idx = static_cast<std::size_t>(j * cols + k);
                    out[c][idx] += fs[idx];
                }
            }
        }
    }
    return out;
}

bool all_finite(const ChannelField& u) {
    for (int c = 0; c < 2; ++c) {
        for (const Complex& v : u.spectrum(c)) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
    }
    for (const Complex& v : u.pressure_spectrum()) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

} // namespace

double channel_automatic_stabilization(const StressParams& params, const ChannelField& u0) {
    if (params.nu1 == 0.0) return 0.0;
    if (params.p == 2.0) return 1.0;
    if (params.delta > 0.0) return std::pow(params.delta, params.p - 2.0);
    const PointwiseState s = channel_pointwise(u0, false);
    double m = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, s.sym_grad(i).frobenius_norm());
    return m > 0.0 ? std::pow(0.1 * m, params.p - 2.0) : 1.0;
}

ChannelSolverState init_channel(const ChannelField& u0, const SolverConfig& config, const StressParams& params,
                                ChannelForcing forcing) {
    if (config.scheme == TimeScheme::rk3_explicit) {
        throw InvalidInput("rk3-fully-explicit is not available on the channel; use imex-cn-ab2 or imex-euler");
    }
    config.validate(params);
    ChannelSolverState st;
    st.u = u0;
    st.cutoff = u0.n1() / 3;
    st.u.truncate(st.cutoff);
    channel_project(st.u);
    st.params = params;
    st.sigma = config.stabilization.value_or(channel_automatic_stabilization(params, st.u));
    st.forcing = std::move(forcing);
    return st;
}

double channel_cfl_number(const ChannelField& u, double dt) {
    const auto u1 = u.nodes(0);
    const auto u2 = u.nodes(1);
    double m = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) m = std::max(m, std::hypot(u1[i], u2[i]));
    return m * dt / std::min(u.h1(), u.h2());
}

void step_channel(ChannelSolverState& st, double dt, TimeScheme scheme, double cfl_limit) {
    if (!(dt > 0.0)) throw InvalidInput("step_channel: dt must be > 0");
    if (scheme == TimeScheme::rk3_explicit) {
        throw InvalidInput("rk3-fully-explicit is not available on the channel");
    }
    const double cfl = channel_cfl_number(st.u, dt);
    if (cfl > cfl_limit) {
        std::ostringstream msg;
        msg << "step rejected: CFL number " << cfl << " exceeds " << cfl_limit << " at t = " << st.t;
        throw NumericalFailure(msg.str());
    }
    const ChannelField& u = st.u;
    const int n2 = u.n2();
    const int cols = u.cols();
    const double h = u.h2();
    const double ih2 = 1.0 / (h * h);
    const Spectra rhs = explicit_rhs(st, st.t);
    const bool ab2 = scheme == TimeScheme::imex_cn_ab2 && st.has_previous && st.previous_dt == dt;
    const double nu = st.params.nu0 + 0.5 * st.params.nu1 * st.sigma;
    // theta = 1/2 for Crank-Nicolson, 1 for the backward Euler start.
    const double theta = ab2 ? 0.5 : 1.0;

    ChannelField next(u.n1(), n2);
    std::copy(u.pressure_spectrum().begin(), u.pressure_spectrum().end(), next.pressure_spectrum_mut().begin());
    const auto pres = u.pressure_spectrum();

    parallel_for(static_cast<std::size_t>(cols - 1), [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        const double kap2 = u.kappa(k) * u.kappa(k);
        const int m = n2 - 1;
        std::vector<double> a(static_cast<std::size_t>(m), -theta * dt * nu * ih2);
        std::vector<double> b(static_cast<std::size_t>(m), 1.0 + theta * dt * nu * (2.0 * ih2 + kap2));
        std::vector<double> c(static_cast<std::size_t>(m), -theta * dt * nu * ih2);
        std::vector<Complex> d(static_cast<std::size_t>(m));
        for (int comp = 0; comp < 2; ++comp) {
            const auto s = u.spectrum(comp);
            const auto cc = static_cast<std::size_t>(comp);
            auto at = [&](int j) { return s[static_cast<std::size_t>(j * cols + k)]; };
            for (int j = 1; j < n2; ++j) {
                const auto idx = static_cast<std::size_t>(j * cols + k);
                Complex explicit_part = ab2 ? 1.5 * rhs[cc][idx] - 0.5 * st.previous_rhs[cc][idx] : rhs[cc][idx];
                Complex lap = (at(j + 1) - 2.0 * at(j) + at(j - 1)) * ih2 - kap2 * at(j);
                const Complex below = pres[static_cast<std::size_t>((j - 1) * cols + k)];
                const Complex above = pres[static_cast<std::size_t>(j * cols + k)];
                const Complex grad_p = comp == 0 ? Complex(0.0, u.kappa(k)) * 0.5 * (below + above) : (above - below) / h;
                d[static_cast<std::size_t>(j - 1)] = at(j) + (1.0 - theta) * dt * nu * lap + dt * explicit_part - dt * grad_p;
            }
            solve_tridiagonal(a, b, c, std::span<Complex>(d));
            auto dst = next.spectrum_mut(comp);
            for (int j = 1; j < n2; ++j) {
                dst[static_cast<std::size_t>(j * cols + k)] = d[static_cast<std::size_t>(j - 1)];
            }
        }
    });

    // Incremental projection: div G phi = div u* / dt.
    auto phi = channel_divergence(next);
    parallel_for(static_cast<std::size_t>(cols - 1), [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        std::vector<Complex> column(static_cast<std::size_t>(n2));
        for (int c = 0; c < n2; ++c) column[static_cast<std::size_t>(c)] = phi[static_cast<std::size_t>(c * cols + k)] / dt;
        solve_pressure_poisson(n2, u.kappa(k), h, column);
        for (int c = 0; c < n2; ++c) phi[static_cast<std::size_t>(c * cols + k)] = column[static_cast<std::size_t>(c)];
    });
    for (int c = 0; c < n2; ++c) phi[static_cast<std::size_t>(c * cols + cols - 1)] = Complex{};
    apply_pressure_gradient(next, phi, dt);
    auto p_new = next.pressure_spectrum_mut();
    for (std::size_t i = 0; i < p_new.size(); ++i) p_new[i] += phi[i];

    if (!all_finite(next)) {
        throw NumericalFailure("channel step produced non-finite values at t = " + std::to_string(st.t));
    }
    st.u = std::move(next);
    st.previous_rhs = rhs;
    st.has_previous = scheme == TimeScheme::imex_cn_ab2;
    st.previous_dt = dt;
    st.t += dt;
    ++st.step_index;
}

// ---------------------------------------------------------------------------
// Run loop

const std::vector<std::string>& channel_extra_columns() {
    static const std::vector<std::string> cols{"alpha1_min", "dpi1_l2",     "dpi2_l2",          "d2star_l2",
                                               "d22u1_l2",   "necas_ratio", "recover_residual", "f1_bound_ratio"};
    return cols;
}

namespace {

struct ChannelSampler {
    ReportBuilder builder;
    int alpha_violations = 0;

    void add(const ChannelSolverState& st, const ChannelField* ut) {
        const PointwiseState pw = channel_pointwise(st.u);
        std::optional<PointwiseState> pw_t;
        if (ut) pw_t = channel_pointwise(*ut, false);
        const auto f = st.forcing.nodes(st.u, st.t);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> extras(channel_extra_columns().size(), nan);
        const Alpha1Field alpha = alpha1_field(pw, st.params);
        if (alpha.min < st.params.nu0) ++alpha_violations;
        const PressureDiagnostics pd = pressure_gradient_diagnostics(st.u, ut, f[0], f[1], st.params);
        extras[0] = alpha.min;
        extras[1] = pd.dpi1_l2;
        extras[2] = pd.dpi2_l2;
        extras[3] = d2star_l2(pw);
        extras[4] = d22u1_l2(pw);
        extras[5] = pd.necas_ratio;
        if (ut) {
            const RecoveryResult rec = recover_d22u1(st.u, ut, f[0], st.params);
            extras[6] = rec.residual;
            extras[7] = rec.f1_bound_ratio;
        }
        builder.add_sample(st.t, pw, pw_t ? &*pw_t : nullptr, f[0], f[1], extras);
    }
};

} // namespace

ChannelRunResult run_channel(const SolverConfig& config, const StressParams& params, const ChannelField& u0,
                             ChannelForcing forcing) {
    ChannelRunResult result;
    ChannelSolverState st = init_channel(u0, config, params, std::move(forcing));
    const int steps = config.step_count();
    const double dt = steps > 0 ? config.T / steps : config.dt;
    ChannelSampler sampler{ReportBuilder(params, channel_extra_columns())};
    sampler.add(st, nullptr);
    result.snapshots.push_back({st.t, st.u});
    for (int s = 1; s <= steps; ++s) {
        const ChannelField previous = st.u;
        try {
            step_channel(st, dt, config.scheme, config.cfl_limit);
        } catch (const NumericalFailure& e) {
            result.failure = e.what();
            break;
        }
        if (s == steps) st.t = config.T;
        if (s % config.monitor_stride == 0 || s == steps) {
            const ChannelField ut = (1.0 / dt) * (st.u - previous);
            sampler.add(st, &ut);
        }
        if ((config.snapshot_stride > 0 && s % config.snapshot_stride == 0) || s == steps) {
            result.snapshots.push_back({st.t, st.u});
        }
    }
    result.alpha1_violations = sampler.alpha_violations;
    if (result.alpha1_violations > 0) {
        result.warnings.push_back("min alpha1 fell below nu0 on " + std::to_string(result.alpha1_violations)
                                  + " monitored samples");
    }
    result.report = sampler.builder.take();
    return result;
}

ChannelRunResult run_channel(const SolverConfig& config, const StressParams& params, const ChannelInitialSpec& u0,
                             int n1, int n2, ChannelForcing forcing) {
    if (params.p < 1.5 || params.p > 2.0) {
        throw InvalidInput("channel runs require p in [3/2, 2], got p = " + std::to_string(params.p));
    }
    const ChannelInitialData init = make_channel_initial(u0, n1, n2);
    ChannelRunResult result = run_channel(config, params, init.u, std::move(forcing));
    result.projection_defect = init.projection_defect;
    result.warnings.insert(result.warnings.begin(), init.warnings.begin(), init.warnings.end());
    return result;
}

} // namespace shearflow
