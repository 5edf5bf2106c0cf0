#include "shearflow/selftest.hpp"

#include "shearflow/channel_solver.hpp"
#include "shearflow/constitutive.hpp"
#include "shearflow/snapshot.hpp"
#include "shearflow/torus_field.hpp"
#include "shearflow/torus_solver.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace shearflow {

namespace {

struct Check {
    const char* name;
    std::function<std::string()> run; ///< empty string on success
};

std::string fmt(const char* label, double v) {
    std::ostringstream ss;
    ss << label << ' ' << v;
    return ss.str();
}

TorusField random_solenoidal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    TorusField w(n);
    const int band = n / 3;
    for (int k1 = 0; k1 <= band; ++k1) {
        for (int k2 = -band; k2 <= band; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            for (int c = 0; c < 2; ++c) {
                w.set_coefficient(c, k1, k2, Complex(g(rng), g(rng)));
            }
        }
    }
    return leray_project(w);
}

std::string constitutive_bounds() {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (double p : {1.5, 1.75, 2.0}) {
        for (double delta : {0.1, 1.0}) {
            const StressParams params{p, delta, 1.0, 1.0};
            for (int i = 0; i < 2000; ++i) {
                const SymTensor2 d{g(rng), g(rng), g(rng)};
                const SymTensor2 c{g(rng), g(rng), g(rng)};
                const auto dd = stress_directional_derivative(d, c, params);
                if (!dd.operator_bound_ok()) {
                    return fmt("coercivity/bound failed at p", p);
                }
            }
        }
    }
    return {};
}

std::string korn_identity() {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 5; ++i) {
        const TorusField v = random_solenoidal(16, rng);
        const auto d = sym_grad(v);
        std::vector<double> dd(d.d11.size());
        for (std::size_t j = 0; j < dd.size(); ++j) {
            dd[j] = d.d11[j] * d.d11[j] + 2.0 * d.d12[j] * d.d12[j] + d.d22[j] * d.d22[j];
        }
        const double sym = std::sqrt(integrate(16, dd));
        const double grad = sobolev_seminorm(v, 1, 2.0);
        const double rel = std::abs(grad - std::sqrt(2.0) * sym) / grad;
        if (rel > 1e-12) return fmt("relative defect", rel);
    }
    return {};
}

std::string leray_idempotent() {
    std::mt19937_64 rng(3);
    const TorusField v = random_solenoidal(16, rng);
    const double defect = v.divergence_defect();
    const TorusField w = leray_project(v);
    double diff = 0.0;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t k = 0; k < v.spectral_size(); ++k) {
            diff = std::max(diff, std::abs(v.spectrum(c)[k] - w.spectrum(c)[k]));
        }
    }
    if (defect > 1e-13 || diff > 1e-13) return fmt("defect", std::max(defect, diff));
    return {};
}

std::string taylor_green_decay() {
    const StressParams params{2.0, 0.0, 0.01, 0.02};
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.T = 0.5;
    TorusInitialSpec init;
    init.kind = TorusInitialSpec::Kind::taylor_green;
    const auto r = run_torus(cfg, params, init, 16);
    if (r.failure) return *r.failure;
    const double a0 = r.report.column("l2").front();
    const double a1 = r.report.last("l2");
    const double exact = a0 * std::exp(-2.0 * (params.nu0 + 0.5 * params.nu1) * cfg.T);
    const double rel = std::abs(a1 - exact) / exact;
    if (rel > 1e-10) return fmt("relative amplitude error", rel);
    return {};
}

std::string poiseuille_steady() {
    const StressParams params{2.0, 0.0, 0.5, 1.0};
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.T = 0.1;
    ChannelInitialSpec init;
    init.kind = ChannelInitialSpec::Kind::poiseuille;
    init.amplitude = 1.0 / (2.0 * (params.nu0 + 0.5 * params.nu1));
    const auto r = run_channel(cfg, params, init, 8, 32, ChannelForcing::constant(1.0, 0.0));
    if (r.failure) return *r.failure;
    const auto u = r.snapshots.back().u.nodes(0);
    double err = 0.0;
    for (int j = 0; j <= 32; ++j) {
        const double x2 = -1.0 + 2.0 * j / 32.0;
        err = std::max(err, std::abs(u[static_cast<std::size_t>(j * 8)] - init.amplitude * (1.0 - x2 * x2)));
    }
    if (err > 1e-10) return fmt("max deviation", err);
    return {};
}

std::string snapshot_round_trip() {
    SnapshotData s;
    s.geometry = Geometry::channel;
    s.n1 = 4;
    s.n2 = 4;
    s.time = 0.25;
    for (std::size_t i = 0; i < 20; ++i) {
        s.u1.push_back(0.1 * static_cast<double>(i));
        s.u2.push_back(-0.3 * static_cast<double>(i));
    }
    const SnapshotData r = decode_snapshot(encode_snapshot(s));
    if (r.geometry != s.geometry || r.n1 != s.n1 || r.n2 != s.n2 || r.time != s.time || r.u1 != s.u1 || r.u2 != s.u2) {
        return "decoded snapshot differs";
    }
    return {};
}

} // namespace

int run_selftest(std::ostream& out) {
    const Check checks[] = {
        {"constitutive_bounds", constitutive_bounds},
        {"korn_identity", korn_identity},
        {"leray_idempotent", leray_idempotent},
        {"taylor_green_decay", taylor_green_decay},
        {"poiseuille_steady", poiseuille_steady},
        {"snapshot_round_trip", snapshot_round_trip},
    };
    int failures = 0;
    for (const auto& c : checks) {
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            out << "PASS " << c.name << '\n';
        } else {
            out << "FAIL " << c.name << ": " << detail << '\n';
            ++failures;
        }
    }
    return failures;
}

} // namespace shearflow
