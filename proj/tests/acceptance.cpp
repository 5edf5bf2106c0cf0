// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include "shearflow/channel_solver.hpp"
#include "shearflow/config.hpp"
#include "shearflow/constitutive.hpp"
#include "shearflow/monitors.hpp"
#include "shearflow/orchestrate.hpp"
#include "shearflow/particles.hpp"
#include "shearflow/torus_field.hpp"
#include "shearflow/torus_solver.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace shearflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void info(int n, const std::string& detail) {
    std::printf("INFO criterion %d: %s\n", n, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void guarded(int n, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        verdict(n, false, std::string("exception: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

void criterion1() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    const int pairs = 100000;
    long coercive_fail = 0, bound_fail = 0, checked = 0;
    double jac_err = 0.0, bracket_err = 0.0;
    for (double p : {1.5, 1.75, 2.0}) {
        for (double delta : {0.0, 0.1, 1.0}) {
            const StressParams params{p, delta, 1.0, 1.0};
            for (int i = 0; i < pairs; ++i) {
                const double scale = std::exp(2.0 * g(rng));
                const Tensor2 a{{scale * g(rng), scale * g(rng), scale * g(rng), scale * g(rng)}};
                const SymTensor2 c = Tensor2{{g(rng), g(rng), g(rng), g(rng)}}.sym();
                const auto dd = stress_directional_derivative(a.sym(), c, params);
                ++checked;
                if (!dd.coercive) ++coercive_fail;
                if (!dd.entry_bound) ++bound_fail;

                // Jacobian against central differences, on a subsample.
                if (i % 10 == 0) {
                    const auto jac = stress_jacobian(a, params);
                    const double h = 1e-6 * std::max(a.sym().frobenius_norm(), 1e-3);
                    double jmax = 0.0, emax = 0.0;
                    for (int kl = 0; kl < 4; ++kl) {
                        Tensor2 ap = a, am = a;
                        ap.a[static_cast<std::size_t>(kl)] += h;
                        am.a[static_cast<std::size_t>(kl)] -= h;
                        const auto sp = stress(ap, params), sm = stress(am, params);
                        const std::array<double, 4> fd{(sp.d11 - sm.d11) / (2 * h), (sp.d12 - sm.d12) / (2 * h),
                                                       (sp.d12 - sm.d12) / (2 * h), (sp.d22 - sm.d22) / (2 * h)};
                        for (int ij = 0; ij < 4; ++ij) {
                            const double j = jac[static_cast<std::size_t>(ij)][static_cast<std::size_t>(kl)];
                            jmax = std::max(jmax, std::abs(j));
                            emax = std::max(emax, std::abs(j - fd[static_cast<std::size_t>(ij)]));
                        }
                    }
                    jac_err = std::max(jac_err, emax / jmax);
                }
                if (p == 2.0) {
                    const Tensor2 b{{g(rng), g(rng), g(rng), g(rng)}};
                    const auto br = monotonicity_bracket(a, b, params);
                    if (br.equivalent_dot > 0.0) {
                        bracket_err = std::max(bracket_err, std::abs(br.lhs_dot / br.equivalent_dot - 1.0));
                        bracket_err = std::max(bracket_err, std::abs(br.lhs_norm / br.equivalent_norm - 1.0));
                    }
                }
            }
        }
    }
    const double elapsed = seconds_since(t0);
    const bool ok = coercive_fail == 0 && bound_fail == 0 && jac_err <= 1e-5 && bracket_err <= 1e-12 && elapsed < 10.0;
    verdict(1, ok,
            fmt("%ld pairs, coercivity failures %ld, bound failures %ld, Jacobian FD rel err %.3g (<= 1e-5), "
                "p=2 bracket |ratio-1| %.3g (<= 1e-12), %.2f s (< 10 s)",
                checked, coercive_fail, bound_fail, jac_err, bracket_err, elapsed));
}

// ---------------------------------------------------------------------------

const StressParams kNewtonian{2.0, 0.0, 0.01, 0.02};

TorusRunResult taylor_green_run(double dt) {
    SolverConfig c;
    c.dt = dt;
    c.T = 1.0;
    c.monitor_stride = 1;
    TorusInitialSpec s;
    s.kind = TorusInitialSpec::Kind::taylor_green;
    return run_torus(c, kNewtonian, s, 64);
}

void criterion2and3() {
    const auto t0 = Clock::now();
    const auto fine = taylor_green_run(1e-3);
    const double elapsed = seconds_since(t0);
    if (fine.failure) {
        verdict(2, false, "run failed: " + *fine.failure);
        verdict(3, false, "run failed");
        return;
    }
    const auto t = fine.report.column("t");
    const auto l2 = fine.report.column("l2");
    const double e0 = 0.5 * l2.front() * l2.front();
    const double e1 = 0.5 * l2.back() * l2.back();
    // At p = 2 the stress is D, so the viscous operator is (nu0 + nu1/2) Laplacian.
    const double nu_eff = kNewtonian.nu0 + 0.5 * kNewtonian.nu1;
    const double expect = e0 * std::exp(-4.0 * nu_eff * t.back());
    const double err = std::abs(e1 / expect - 1.0);
    verdict(2, err <= 1e-3 && elapsed < 60.0 && std::abs(t.back() - 1.0) < 1e-12,
            fmt("N=64 dt=1e-3 E(1)/E(0)=%.12g vs exp(-4 nu_eff)=%.12g, rel err %.3g (<= 1e-3), %.1f s (< 60 s)",
                e1 / e0, expect / e0, err, elapsed));
    const double literal = std::exp(-4.0 * (kNewtonian.nu0 + kNewtonian.nu1));
    info(2, fmt("rate 4(nu0+nu1) would give %.12g, rel err %.3g", literal, std::abs(e1 / e0 / literal - 1.0)));

    const auto coarse = taylor_green_run(2e-3);
    if (coarse.failure) {
        verdict(3, false, "dt=2e-3 run failed: " + *coarse.failure);
        return;
    }
    double rmax = 0.0;
    for (double r : fine.report.column("energy_residual")) rmax = std::max(rmax, r);
    const double r_fine = fine.report.last("energy_residual");
    const double r_coarse = coarse.report.last("energy_residual");
    const double order = testing::observed_order(r_coarse, r_fine);
    verdict(3, rmax <= 1e-6 && order >= 1.8,
            fmt("max residual %.3g (<= 1e-6); residual at t=1: dt=2e-3 %.3g, dt=1e-3 %.3g, order %.2f (>= 1.8)",
                rmax, r_coarse, r_fine, order));
}

// ---------------------------------------------------------------------------

void criterion4() {
    const StressParams params{2.0, 0.0, 0.5, 1.0};
    const double nu_eff = params.nu0 + 0.5 * params.nu1;
    SolverConfig c;
    c.dt = 0.01;
    c.T = 15.0;
    c.monitor_stride = 100;
    const int n1 = 8, n2 = 64;
    const auto r = run_channel(c, params, ChannelInitialSpec{}, n1, n2, ChannelForcing::constant(1.0, 0.0));
    if (r.failure) {
        verdict(4, false, "run failed: " + *r.failure);
        return;
    }
    const auto& u = r.snapshots.back().u;
    const auto u1 = u.nodes(0);
    const auto u2 = u.nodes(1);
    double err = 0.0;
    for (int j = 0; j <= n2; ++j) {
        const double y = u.x2(j);
        for (int i = 0; i < n1; ++i) {
            const auto k = static_cast<std::size_t>(j * n1 + i);
            err = std::max(err, std::abs(u1[k] - (1 - y * y) / (2 * nu_eff)));
            err = std::max(err, std::abs(u2[k]));
        }
    }
    verdict(4, err <= 1e-3, fmt("N2=64 T=15 L-inf error vs (1-x2^2)/(2 nu_eff) = %.3g (<= 1e-3)", err));
}

// ---------------------------------------------------------------------------

void criterion5() {
    const StressParams params{1.5, 0.2, 0.01, 0.05};
    std::vector<double> residuals;
    long samples = 0, violations = 0;
    double alpha_min = INFINITY;
    for (int n : {16, 32, 64}) {
        const double h = 2.0 / n;
        SolverConfig c;
        c.dt = 0.8 * h * h;
        c.T = 0.1;
        c.monitor_stride = 1;
        ChannelInitialSpec s;
        s.kind = ChannelInitialSpec::Kind::stream;
        s.amplitude = 0.2;
        const auto r = run_channel(c, params, s, n, n);
        if (r.failure) {
            verdict(5, false, fmt("n=%d run failed: ", n) + *r.failure);
            return;
        }
        for (double a : r.report.column("alpha1_min")) {
            ++samples;
            alpha_min = std::min(alpha_min, a);
            if (!(a >= params.nu0)) ++violations;
        }
        violations += r.alpha1_violations;
        residuals.push_back(r.report.last("recover_residual"));
    }
    const double o1 = testing::observed_order(residuals[0], residuals[1]);
    const double o2 = testing::observed_order(residuals[1], residuals[2]);
    verdict(5, violations == 0 && o2 >= 1.5,
            fmt("min alpha1 %.6g >= nu0 %.3g on %ld samples (%ld violations); recover residual %.3g, %.3g, %.3g, "
                "orders %.2f, %.2f (>= 1.5)",
                alpha_min, params.nu0, samples, violations, residuals[0], residuals[1], residuals[2], o1, o2));
}

// ---------------------------------------------------------------------------

void criterion6() {
    auto cfg = parse_config(std::filesystem::path(SHEARFLOW_TEST_DIR) / ".." / "docs" / "examples" / "rough_ladder.toml");
    cfg.output.dir = testing::scratch_dir("acceptance_rough_ladder");
    const auto r = orchestrate(cfg);
    if (r.exit_code != kExitOk || !r.dashti_robinson) {
        verdict(6, false, fmt("ladder failed with exit code %d", r.exit_code));
        return;
    }
    const auto& d = *r.dashti_robinson;
    std::string levels;
    for (double w : d.weighted_by_level) levels += fmt(" %.6g", w);
    verdict(6, d.weighted_change <= 0.05 && d.verdict == Verdict::satisfied,
            fmt("int t||u||_{2,2}^2 by level:%s; change at last doubling %.4f (<= 0.05); dashti_robinson_check %s",
                levels.c_str(), d.weighted_change, to_string(d.verdict).c_str()));
    std::string unweighted;
    for (const auto& run : r.runs) unweighted += fmt(" n%d=%.6g", run.plan.n1, run.report.last("int_h2"));
    info(6, "unweighted int ||u||_{2,2}^2 dt:" + unweighted);
}

// ---------------------------------------------------------------------------

void criterion7() {
    SolverConfig c;
    c.dt = 1e-3;
    c.T = 1.0;
    c.monitor_stride = 1000;
    c.snapshot_stride = 4;
    TorusInitialSpec s;
    s.kind = TorusInitialSpec::Kind::taylor_green;
    s.amplitude = 10.0;
    const auto run = run_torus(c, StressParams{2.0, 0.0, 0.01, 0.02}, s, 32);
    if (run.failure) {
        verdict(7, false, "history run failed: " + *run.failure);
        return;
    }
    const auto h = VelocityHistory::from_torus_run(run.snapshots);
    auto max_of = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        return m;
    };

    BundleSpec fb;
    fb.base_points = {{0.5, 1.0}, {2.0, 0.3}, {1.2, 2.5}};
    const double e1 = max_of(forward_backward_error(h, fb, 4e-3));
    const double e2 = max_of(forward_backward_error(h, fb, 2e-3));
    const double order = testing::observed_order(e1, e2);

    double worst = 0.0;
    for (double eps : {1e-4, 1e-6}) {
        BundleSpec b;
        b.base_points = {{0.0, 0.0}, {1.0, 2.0}};
        b.eps = eps;
        const auto bundle = trace(h, b, 2e-3);
        worst = std::max(worst, separation_diagnostics(bundle, h).worst_ratio);
    }

    BundleSpec sq;
    sq.base_points = square_tracers({1.0, 0.7}, 0.2, 100);
    sq.output_stride = 1000000;
    const auto b = trace(h, sq, 1e-3);
    std::vector<Point> a0, a1;
    for (const auto& p : b.paths) {
        a0.push_back(p.front());
        a1.push_back(p.back());
    }
    const double drift = std::abs(shoelace_area(a1) / shoelace_area(a0) - 1.0);

    verdict(7, order >= 3.5 && worst <= 2.0 && drift <= 1e-3,
            fmt("FB error %.3g -> %.3g, order %.2f (>= 3.5); worst separation/envelope %.3f (<= 2) for eps 1e-4, 1e-6; "
                "area drift %.3g (<= 1e-3)",
                e1, e2, order, worst, drift));
}

// ---------------------------------------------------------------------------

void criterion8() {
    std::mt19937_64 rng(8);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 32;
        const auto v = testing::random_solenoidal(n, 12, rng);
        const auto d = sym_grad(v);
        std::vector<double> dd(d.d11.size());
        for (std::size_t i = 0; i < dd.size(); ++i) {
            dd[i] = d.d11[i] * d.d11[i] + 2 * d.d12[i] * d.d12[i] + d.d22[i] * d.d22[i];
        }
        const double sym = std::sqrt(integrate(n, dd));
        const double grad = sobolev_seminorm(v, 1, 2.0);
        worst = std::max(worst, std::abs(grad - std::sqrt(2.0) * sym) / grad);
    }
    verdict(8, worst <= 1e-12, fmt("100 fields, max |grad v| vs sqrt2 |Dv| rel diff %.3g (<= 1e-12)", worst));
}

// ---------------------------------------------------------------------------

void criterion9() {
    const std::string text = "[run]\nseed = 11\n[params]\np = 1.7\ndelta = 0.1\nnu0 = 0.02\nnu1 = 0.05\n"
                             "[grid]\nn = 32\n[time]\ndt = 2e-3\nT = 0.2\n[initial]\nkind = \"spectrum\"\n"
                             "amplitude = 0.5\n[output]\nwrite_snapshots = false\n";
    std::string bytes[2];
    for (int i = 0; i < 2; ++i) {
        auto cfg = parse_config_text(text);
        cfg.output.dir = testing::scratch_dir("acceptance_det_" + std::to_string(i));
        const auto r = orchestrate(cfg);
        if (r.exit_code != kExitOk) {
            verdict(9, false, fmt("run %d exit code %d", i, r.exit_code));
            return;
        }
        bytes[i] = read_file(cfg.output.dir / "report.csv");
    }
    verdict(9, bytes[0] == bytes[1] && !bytes[0].empty(),
            fmt("two seeded runs, report.csv %zu bytes, sha256 %s vs %s", bytes[0].size(),
                sha256_hex(bytes[0]).substr(0, 16).c_str(), sha256_hex(bytes[1]).substr(0, 16).c_str()));
}

} // namespace

int main() {
    guarded(1, criterion1);
    guarded(2, criterion2and3);
    guarded(4, criterion4);
    guarded(5, criterion5);
    guarded(6, criterion6);
    guarded(7, criterion7);
    guarded(8, criterion8);
    guarded(9, criterion9);
    std::printf("%d criteria failed\n", g_failures);
    return g_failures;
}
