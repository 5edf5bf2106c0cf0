#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "shearflow/errors.hpp"
#include "shearflow/monitors.hpp"
#include "shearflow/torus_solver.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace shearflow;

namespace {

double spectral_distance(const TorusField& a, const TorusField& b) {
    return sobolev_norm(a - b, 0, 2.0, NormMethod::parseval);
}

TorusInitialSpec tg_spec(double amplitude = 1.0) {
    TorusInitialSpec s;
    s.kind = TorusInitialSpec::Kind::taylor_green;
    s.amplitude = amplitude;
    return s;
}

TorusInitialSpec rough_spec(double amplitude = 0.1) {
    TorusInitialSpec s;
    s.kind = TorusInitialSpec::Kind::spectrum;
    s.amplitude = amplitude;
    s.alpha = 1.1;
    return s;
}

} // namespace

TEST_CASE("scheme names round-trip") {
    for (auto s : {TimeScheme::imex_cn_ab2, TimeScheme::imex_euler, TimeScheme::rk3_explicit}) {
        CHECK(parse_time_scheme(to_string(s)) == s);
    }
    CHECK_THROWS_AS(parse_time_scheme("leapfrog"), InvalidInput);
}

TEST_CASE("config validation") {
    SolverConfig c;
    StressParams inviscid{1.6, 0.1, 0.0, 0.1};
    CHECK_THROWS_AS(c.validate(inviscid), InvalidInput);
    c.scheme = TimeScheme::rk3_explicit;
    CHECK_NOTHROW(c.validate(inviscid));
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(inviscid), InvalidInput);
    SolverConfig d;
    d.T = 1.0;
    d.dt = 0.3;
    CHECK(d.step_count() == 4);
    d.T = 0.0;
    CHECK(d.step_count() == 0);
}

TEST_CASE("zero field and zero force stay zero") {
    SolverConfig c;
    const StressParams params{1.6, 0.1, 0.05, 0.1};
    auto st = init_torus(TorusField(16), c, params);
    for (int i = 0; i < 5; ++i) step(st, 1e-2, TimeScheme::imex_cn_ab2);
    CHECK(sobolev_norm(st.u, 0, 2.0) == 0.0);
}

TEST_CASE("integrating factor is exact on a Stokes mode") {
    const StressParams params{2.0, 0.0, 0.3, 0.0};
    TorusInitialSpec s;
    s.kind = TorusInitialSpec::Kind::shear;
    const auto init = make_initial_field(s, 16, galerkin_cutoff(16), 0);
    SolverConfig c;
    auto st = init_torus(init.u, c, params);
    const double a0 = std::abs(st.u.coefficient(0, 0, 1));
    const double dt = 0.05;
    for (int i = 1; i <= 10; ++i) {
        step(st, dt, TimeScheme::imex_euler);
        CHECK(std::abs(st.u.coefficient(0, 0, 1)) == doctest::Approx(a0 * std::exp(-params.nu0 * dt * i)).epsilon(1e-14));
    }
}

TEST_CASE("Taylor-Green decays at the total Newtonian rate for every scheme") {
    const StressParams params{2.0, 0.5, 0.01, 0.02};
    const double nu_eff = params.nu0 + 0.5 * params.nu1;
    for (auto scheme : {TimeScheme::imex_cn_ab2, TimeScheme::imex_euler, TimeScheme::rk3_explicit}) {
        for (auto diffusion : {DiffusionMode::integrating_factor, DiffusionMode::crank_nicolson}) {
            SolverConfig c;
            c.dt = 1e-2;
            c.T = 1.0;
            c.scheme = scheme;
            c.diffusion = diffusion;
            c.monitor_stride = 10;
            const auto r = run_torus(c, params, tg_spec(), 16);
            REQUIRE_FALSE(r.failure);
            const auto t = r.report.column("t");
            const auto l2 = r.report.column("l2");
            // The integrating factor is exact for this mode; the others carry their truncation error.
            const bool exact = scheme != TimeScheme::rk3_explicit && diffusion == DiffusionMode::integrating_factor;
            for (std::size_t i = 0; i < t.size(); ++i) {
                CHECK(l2[i] == doctest::Approx(l2[0] * std::exp(-2 * nu_eff * t[i])).epsilon(exact ? 1e-12 : 1e-4));
            }
        }
    }
}

TEST_CASE("T = 0 gives the initial row only") {
    SolverConfig c;
    c.T = 0.0;
    const auto r = run_torus(c, StressParams{1.6, 0.1, 0.05, 0.1}, tg_spec(), 16);
    CHECK_FALSE(r.failure);
    CHECK(r.report.size() == 1);
    CHECK(r.report.last("t") == 0.0);
    CHECK(r.snapshots.size() == 1);
}

TEST_CASE("initial data: Taylor-Green needs no projection") {
    const auto init = make_initial_field(tg_spec(), 16, galerkin_cutoff(16), 0);
    CHECK(init.projection_defect <= 1e-15);
    CHECK(init.warnings.empty());
}

TEST_CASE("initial data: non-solenoidal modes are projected with a warning") {
    TorusInitialSpec s;
    s.kind = TorusInitialSpec::Kind::modes;
    s.modes.push_back({1, 0, {1.0, 0.0}, {0.0, 0.0}}); // sin(x1) e1 is a gradient
    s.modes.push_back({0, 1, {1.0, 0.0}, {0.0, 0.0}});
    const auto init = make_initial_field(s, 16, galerkin_cutoff(16), 0);
    CHECK(init.projection_defect > 0.1);
    CHECK_FALSE(init.warnings.empty());
    CHECK(init.u.divergence_defect() <= 1e-14);
}

TEST_CASE("initial data: rough spectrum grows in H2 with the cutoff") {
    double prev_h2 = 0.0, prev_l2 = 0.0;
    for (int n : {48, 96, 192}) {
        const int m = n / 3;
        const auto init = make_initial_field(rough_spec(1.0), n, m, 7);
        const double l2 = sobolev_norm(init.u, 0, 2.0);
        const double h2 = sobolev_norm(init.u, 2, 2.0);
        CHECK(std::isfinite(l2));
        CHECK(h2 > 1.5 * prev_h2);
        if (prev_l2 > 0.0) CHECK(std::abs(l2 - prev_l2) / prev_l2 < 0.25);
        prev_h2 = h2;
        prev_l2 = l2;
    }
}

TEST_CASE("initial data: coarse resolutions see the low modes of fine ones") {
    const auto a = make_initial_field(rough_spec(), 32, 10, 9);
    const auto b = make_initial_field(rough_spec(), 64, 10, 9);
    for (int k1 = 0; k1 <= 10; ++k1) {
        for (int k2 = -10; k2 <= 10; ++k2) {
            CHECK(std::abs(a.u.coefficient(0, k1, k2) - b.u.coefficient(0, k1, k2)) <= 1e-15);
        }
    }
    const auto c = make_initial_field(rough_spec(), 32, 10, 10);
    CHECK(spectral_distance(a.u, c.u) > 1e-3);
}

TEST_CASE("steps keep the Galerkin band and the divergence constraint") {
    const StressParams params{1.6, 0.1, 0.05, 0.1};
    const int n = 32;
    SolverConfig c;
    const auto init = make_initial_field(rough_spec(1.0), n, galerkin_cutoff(n), 3);
    auto st = init_torus(init.u, c, params);
    for (int i = 0; i < 20; ++i) {
        step(st, 2e-3, TimeScheme::imex_cn_ab2);
        CHECK(st.u.max_active_mode() <= galerkin_cutoff(n));
        CHECK(st.u.divergence_defect() <= 1e-10);
    }
}

TEST_CASE("unforced energy is non-increasing") {
    const StressParams params{1.5, 0.1, 0.02, 0.1};
    SolverConfig c;
    c.dt = 2e-3;
    c.T = 0.5;
    const auto r = run_torus(c, params, rough_spec(1.0), 32);
    REQUIRE_FALSE(r.failure);
    const auto l2 = r.report.column("l2");
    for (std::size_t i = 1; i < l2.size(); ++i) {
        CHECK(l2[i] * l2[i] <= l2[i - 1] * l2[i - 1] + 1e-10);
    }
}

TEST_CASE("second order in time for imex-cn-ab2, first for imex-euler") {
    const StressParams params{1.6, 0.1, 0.05, 0.1};
    const int n = 32;
    const auto init = make_initial_field(rough_spec(0.5), n, galerkin_cutoff(n), 5);
    auto final_field = [&](TimeScheme scheme, double dt) {
        SolverConfig c;
        c.dt = dt;
        c.T = 0.2;
        c.scheme = scheme;
        c.monitor_stride = 1000;
        auto r = run_torus(c, params, init.u);
        REQUIRE_FALSE(r.failure);
        return r.snapshots.back().u;
    };
    for (auto [scheme, expected] : {std::pair{TimeScheme::imex_cn_ab2, 2.0}, std::pair{TimeScheme::imex_euler, 1.0},
                                    std::pair{TimeScheme::rk3_explicit, 3.0}}) {
        const auto ref = final_field(scheme, 2.5e-4);
        const double e1 = spectral_distance(final_field(scheme, 4e-3), ref);
        const double e2 = spectral_distance(final_field(scheme, 2e-3), ref);
        const double order = testing::observed_order(e1, e2);
        MESSAGE(to_string(scheme) << " order " << order);
        CHECK(order > expected - 0.3);
    }
}

TEST_CASE("CFL guard rejects the step and leaves the state unchanged") {
    const StressParams params{2.0, 0.0, 0.01, 0.0};
    const auto init = make_initial_field(tg_spec(100.0), 16, galerkin_cutoff(16), 0);
    SolverConfig c;
    auto st = init_torus(init.u, c, params);
    const double before = sobolev_norm(st.u, 0, 2.0);
    CHECK(cfl_number(st.u, 0.1) > 1.0);
    CHECK_THROWS_AS(step(st, 0.1, TimeScheme::imex_cn_ab2), NumericalFailure);
    CHECK(sobolev_norm(st.u, 0, 2.0) == before);
    CHECK(st.t == 0.0);
}

TEST_CASE("a failed run keeps its partial report") {
    SolverConfig c;
    c.dt = 0.1;
    c.T = 1.0;
    const auto r = run_torus(c, StressParams{2.0, 0.0, 0.01, 0.0}, tg_spec(100.0), 16);
    REQUIRE(r.failure);
    CHECK(r.report.size() >= 1);
}

TEST_CASE("nu0 = 0 with the explicit scheme stays finite over a short time") {
    const StressParams params{1.6, 0.1, 0.0, 0.1};
    SolverConfig c;
    c.scheme = TimeScheme::rk3_explicit;
    c.dt = 1e-3;
    c.T = 0.05;
    const auto r = run_torus(c, params, tg_spec(), 16);
    REQUIRE_FALSE(r.failure);
    for (double v : r.report.column("I")) CHECK(std::isfinite(v));
    for (double v : r.report.column("l2")) CHECK(std::isfinite(v));
}

TEST_CASE("identical seeds give identical runs") {
    SolverConfig c;
    c.dt = 2e-3;
    c.T = 0.1;
    c.seed = 42;
    const StressParams params{1.6, 0.1, 0.05, 0.1};
    const auto a = run_torus(c, params, rough_spec(), 16);
    const auto b = run_torus(c, params, rough_spec(), 16);
    CHECK(a.report.to_csv() == b.report.to_csv());
}

TEST_CASE("perturbations obey a Gronwall envelope") {
    const StressParams params{1.6, 0.1, 0.05, 0.1};
    const int n = 32;
    const double dt = 2e-3;
    const int steps = 250;
    const auto base = make_initial_field(rough_spec(1.0), n, galerkin_cutoff(n), 1);
    std::mt19937_64 rng(2);
    auto direction = testing::random_solenoidal(n, galerkin_cutoff(n), rng);
    direction = (1.0 / sobolev_norm(direction, 0, 2.0)) * direction;

    auto growth = [&](double eps, double c_gronwall, double* c_fit) {
        SolverConfig cfg;
        auto s1 = init_torus(base.u, cfg, params);
        auto s2 = init_torus(base.u + eps * direction, cfg, params);
        double integral = 0.0;
        double g_prev = std::pow(sobolev_seminorm(s1.u, 1, 2.0), 2);
        bool ok = true;
        for (int i = 0; i < steps; ++i) {
            step(s1, dt, TimeScheme::imex_cn_ab2);
            step(s2, dt, TimeScheme::imex_cn_ab2);
            const double g = std::pow(sobolev_seminorm(s1.u, 1, 2.0), 2);
            integral += 0.5 * dt * (g + g_prev);
            g_prev = g;
            const double diff = sobolev_norm(s2.u - s1.u, 0, 2.0);
            if (c_fit != nullptr && diff > eps) {
                *c_fit = std::max(*c_fit, params.nu0 * std::log(diff / eps) / integral);
            }
            if (diff > eps * std::exp(c_gronwall * integral / params.nu0) * (1.0 + 1e-9)) ok = false;
        }
        return ok;
    };
    double c_fit = 0.0;
    growth(1e-4, 1e300, &c_fit);
    MESSAGE("fitted Gronwall constant " << c_fit);
    CHECK(growth(1e-4, 2.0 * c_fit, nullptr));
    CHECK(growth(1e-6, 2.0 * c_fit, nullptr));
}

TEST_CASE("steady forcing is projected and drives the flow") {
    const StressParams params{2.0, 0.0, 0.1, 0.0};
    const int n = 16;
    auto f = testing::torus_from(n, [](double, double y) { return std::array<double, 2>{std::sin(y), 0.0}; });
    SolverConfig c;
    c.dt = 1e-2;
    c.T = 40.0;
    c.monitor_stride = 1000;
    const auto r = run_torus(c, params, TorusField(n), TorusForcing::steady(f));
    REQUIRE_FALSE(r.failure);
    // u' = f - nu0 u on a |k| = 1 mode.
    const auto u = r.snapshots.back().u.evaluate(0.0, 1.0);
    const double expect = std::sin(1.0) / params.nu0 * (1.0 - std::exp(-params.nu0 * c.T));
    CHECK(u[0] == doctest::Approx(expect).epsilon(1e-3));
}
