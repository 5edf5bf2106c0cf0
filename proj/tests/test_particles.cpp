#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "shearflow/channel_solver.hpp"
#include "shearflow/errors.hpp"
#include "shearflow/particles.hpp"
#include "shearflow/torus_solver.hpp"
#include "support.hpp"

#include <cmath>

using namespace shearflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

VelocityHistory constant_flow(double t1 = 1.0) {
    return VelocityHistory::analytic(Geometry::torus, [](double, double, double) { return Point{1.0, 0.0}; }, 0.0, t1);
}

VelocityHistory frozen(const TorusField& u, double t1) {
    return VelocityHistory::torus({0.0, t1}, {u, u});
}

TorusField shear(int n) {
    return testing::torus_from(n, [](double, double y) { return std::array<double, 2>{std::sin(y), 0.0}; });
}

TorusField taylor_green(int n, double a = 1.0) {
    return testing::torus_from(n, [a](double x, double y) {
        return std::array<double, 2>{a * std::sin(x) * std::cos(y), -a * std::cos(x) * std::sin(y)};
    });
}

VelocityHistory tg_history(double amplitude) {
    SolverConfig c;
    c.dt = 1e-3;
    c.T = 1.0;
    c.monitor_stride = 1000;
    c.snapshot_stride = 4;
    TorusInitialSpec s;
    s.kind = TorusInitialSpec::Kind::taylor_green;
    s.amplitude = amplitude;
    const auto r = run_torus(c, StressParams{2.0, 0.0, 0.01, 0.02}, s, 32);
    REQUIRE_FALSE(r.failure);
    return VelocityHistory::from_torus_run(r.snapshots);
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

} // namespace

TEST_CASE("velocity: constant, stagnation point and shear") {
    const auto c = constant_flow();
    const auto v = c.velocity({3.0, -2.0}, 0.4);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 0.0);

    const auto tg = frozen(taylor_green(16), 1.0);
    const auto s = tg.velocity({0.0, 0.0}, 0.5);
    CHECK(std::abs(s[0]) <= 1e-15);
    CHECK(std::abs(s[1]) <= 1e-15);

    const auto sh = frozen(shear(16), 1.0);
    const auto w = sh.velocity({0.0, 0.5 * kPi}, 0.2);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(w[1]) <= 1e-15);
}

TEST_CASE("velocity: time span and channel clamping") {
    const auto h = frozen(shear(16), 1.0);
    CHECK_THROWS_AS((void)h.velocity({0.0, 0.0}, 1.5), InvalidInput);
    CHECK_THROWS_AS((void)h.velocity({0.0, 0.0}, -0.1), InvalidInput);

    const auto u = testing::channel_from(8, 16, [](double, double y) { return std::array<double, 2>{1 - y * y, 0.0}; });
    const auto ch = VelocityHistory::channel({0.0, 1.0}, {u, u});
    bool clamped = false;
    const auto inside = ch.velocity({0.1, 0.5}, 0.5, &clamped);
    CHECK_FALSE(clamped);
    CHECK(inside[0] == doctest::Approx(0.75).epsilon(1e-12));
    const auto outside = ch.velocity({0.1, 1.01}, 0.5, &clamped);
    CHECK(clamped);
    CHECK(outside[0] == 0.0);
}

TEST_CASE("velocity: linear in time between snapshots") {
    const auto u = shear(16);
    const auto h = VelocityHistory::torus({0.0, 1.0}, {u, 3.0 * u});
    CHECK(h.velocity({0.0, 0.5 * kPi}, 0.25)[0] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("trace: translation, stagnation and shear transport") {
    BundleSpec spec;
    spec.base_points = {{0.0, 0.0}};
    spec.t0 = 0.0;
    spec.t1 = 1.0;
    const auto b = trace(constant_flow(), spec, 0.01);
    CHECK(b.paths[0].front() == Point{0.0, 0.0});
    CHECK(b.paths[0].back()[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.paths[0].back()[1] == 0.0);

    const auto tg = trace(frozen(taylor_green(16), 1.0), spec, 0.01);
    for (const auto& x : tg.paths[0]) {
        CHECK(std::abs(x[0]) <= 1e-14);
        CHECK(std::abs(x[1]) <= 1e-14);
    }

    BundleSpec sspec = spec;
    sspec.base_points = {{0.0, 0.5 * kPi}};
    sspec.t1 = 2.0;
    const auto sh = trace(frozen(shear(16), 2.0), sspec, 0.01);
    for (std::size_t i = 0; i < sh.times.size(); ++i) {
        CHECK(sh.paths[0][i][0] == doctest::Approx(sh.times[i]).epsilon(1e-12));
        CHECK(sh.paths[0][i][1] == doctest::Approx(0.5 * kPi).epsilon(1e-14));
    }
}

TEST_CASE("trace: dt larger than the snapshot spacing is rejected") {
    const auto u = shear(16);
    const auto h = VelocityHistory::torus({0.0, 0.1, 0.2}, {u, u, u});
    BundleSpec spec;
    spec.base_points = {{0.0, 0.0}};
    spec.t1 = 0.2;
    CHECK_THROWS_AS(trace(h, spec, 0.15), InvalidInput);
}

TEST_CASE("bundle layout, wrapping and exact start") {
    BundleSpec spec;
    spec.base_points = {{6.0, 0.1}, {1.0, 1.0}};
    spec.eps = 0.01;
    spec.satellites = 4;
    spec.t1 = 3.0;
    std::vector<int> group;
    const auto pts = bundle_points(spec, &group);
    CHECK(pts.size() == 10);
    CHECK(group == std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    const auto b = trace(constant_flow(3.0), spec, 0.01);
    for (std::size_t p = 0; p < b.paths.size(); ++p) {
        CHECK(b.paths[p].front() == pts[p]);
        for (std::size_t i = 0; i < b.times.size(); ++i) {
            for (int c = 0; c < 2; ++c) {
                const double d = (b.paths[p][i][c] - b.wrapped[p][i][c]) / kTwoPi;
                CHECK(std::abs(d - std::round(d)) <= 1e-12);
                CHECK(b.wrapped[p][i][c] >= 0.0);
                CHECK(b.wrapped[p][i][c] < kTwoPi);
            }
        }
    }
}

TEST_CASE("channel paths stay inside the walls") {
    ChannelInitialSpec s;
    s.kind = ChannelInitialSpec::Kind::stream;
    s.amplitude = 0.5;
    SolverConfig c;
    c.dt = 2e-3;
    c.T = 0.5;
    c.snapshot_stride = 10;
    c.monitor_stride = 1000;
    const auto r = run_channel(c, StressParams{1.8, 0.1, 0.1, 0.1}, s, 16, 16);
    REQUIRE_FALSE(r.failure);
    const auto h = VelocityHistory::from_channel_run(r.snapshots);
    BundleSpec spec;
    spec.base_points = {{0.0, 0.9}, {0.5, -0.95}, {-0.7, 0.0}};
    spec.t1 = 0.5;
    const auto b = trace(h, spec, 5e-3);
    CHECK(b.clamp_events == 0);
    for (const auto& path : b.wrapped) {
        for (const auto& x : path) {
            CHECK(std::abs(x[1]) <= 1.0);
            CHECK(x[0] >= -1.0);
            CHECK(x[0] < 1.0);
        }
    }
}

TEST_CASE("forward-backward error: constant and frozen shear") {
    BundleSpec spec;
    spec.base_points = {{0.3, 0.4}, {2.0, 1.0}};
    spec.t1 = 1.0;
    CHECK(max_of(forward_backward_error(constant_flow(), spec, 1e-2)) <= 1e-13);
    CHECK(max_of(forward_backward_error(frozen(shear(16), 1.0), spec, 1e-3)) <= 1e-10);
}

TEST_CASE("forward-backward error: RK4 order on a Taylor-Green history") {
    const auto h = tg_history(10.0);
    BundleSpec spec;
    spec.base_points = {{0.5, 1.0}, {2.0, 0.3}, {1.2, 2.5}};
    spec.t1 = 1.0;
    const double e1 = max_of(forward_backward_error(h, spec, 4e-3));
    const double e2 = max_of(forward_backward_error(h, spec, 2e-3));
    MESSAGE("order " << testing::observed_order(e1, e2));
    CHECK(testing::observed_order(e1, e2) >= 3.5);
}

TEST_CASE("separation: degenerate bundles") {
    BundleSpec spec;
    spec.base_points = {{1.0, 1.0}, {1.0, 1.0}};
    spec.t1 = 1.0;
    auto b = trace(frozen(taylor_green(16), 1.0), spec, 0.01);
    CHECK_THROWS_AS(separation_diagnostics(b, frozen(taylor_green(16), 1.0)), InvalidInput);
    b.group = {0, 0};
    const auto d = separation_diagnostics(b, frozen(taylor_green(16), 1.0));
    for (double s : d.separation) CHECK(s == 0.0);

    BundleSpec cs;
    cs.base_points = {{0.0, 0.0}};
    cs.eps = 1e-3;
    cs.t1 = 1.0;
    const auto cb = trace(constant_flow(), cs, 0.01);
    const auto cd = separation_diagnostics(cb, constant_flow());
    for (double s : cd.separation) CHECK(s == doctest::Approx(cd.separation.front()).epsilon(1e-9));
}

TEST_CASE("separation near the hyperbolic point follows the linearized rate") {
    const auto h = tg_history(1.0);
    BundleSpec spec;
    spec.base_points = {{0.0, 0.0}};
    spec.eps = 1e-5;
    spec.satellites = 4;
    spec.t1 = 1.0;
    const auto b = trace(h, spec, 4e-3);
    const auto d = separation_diagnostics(b, h);
    const double rate = std::log(d.separation.back() / d.separation.front());
    // Linearization at the origin: eigenvalues +-a(t), a(t) = exp(-2 nu_eff t).
    const double nu_eff = 0.02;
    const double lambda = (1.0 - std::exp(-2 * nu_eff)) / (2 * nu_eff);
    CHECK(rate == doctest::Approx(lambda).epsilon(1e-3));
    // The fit pools all times while the amplitude decays by 4% over the run.
    CHECK(rate <= d.lipschitz * 1.01);
    CHECK(d.within(2.0));
}

TEST_CASE("Osgood envelope solves its ODE") {
    for (double s0 : {1e-6, 1e-3, 0.5, 2.0}) {
        const double L = 1.5;
        for (double t : {0.1, 0.5, 1.0}) {
            const double h = 1e-6;
            const double ds = (osgood_envelope(s0, L, t + h) - osgood_envelope(s0, L, t - h)) / (2 * h);
            const double s = osgood_envelope(s0, L, t);
            CHECK(ds == doctest::Approx(L * log_lipschitz_modulus(s)).epsilon(1e-6));
        }
        CHECK(osgood_envelope(s0, L, 0.0) == doctest::Approx(s0).epsilon(1e-15));
    }
    CHECK(log_lipschitz_modulus(2.0) == 2.0);
    CHECK(log_lipschitz_modulus(std::exp(-1.0)) == doctest::Approx(2.0 * std::exp(-1.0)));
}

TEST_CASE("tracer square keeps its area in a solenoidal flow") {
    const auto h = tg_history(1.0);
    BundleSpec spec;
    spec.base_points = square_tracers({1.0, 0.7}, 0.2, 100);
    spec.t1 = 1.0;
    spec.output_stride = 1000;
    const auto b = trace(h, spec, 1e-3);
    std::vector<Point> a0, a1;
    for (const auto& p : b.paths) {
        a0.push_back(p.front());
        a1.push_back(p.back());
    }
    CHECK(shoelace_area(a0) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(std::abs(shoelace_area(a1) / shoelace_area(a0) - 1.0) <= 1e-3);
}

TEST_CASE("history from a snapshot directory") {
    const auto dir = testing::scratch_dir("particles_history");
    const auto u = taylor_green(16);
    for (int i = 0; i < 3; ++i) {
        SnapshotData s;
        s.geometry = Geometry::torus;
        s.n1 = s.n2 = 16;
        s.time = 0.5 * i;
        const auto v = (1.0 + i) * u;
        s.u1 = v.grid(0);
        s.u2 = v.grid(1);
        write_snapshot(dir / ("s" + std::to_string(2 - i) + ".sf2d"), s);
    }
    const auto h = VelocityHistory::from_directory(dir);
    CHECK(h.times() == std::vector<double>{0.0, 0.5, 1.0});
    const auto v = h.velocity({0.4, 0.3}, 0.75);
    CHECK(v[0] == doctest::Approx(2.5 * std::sin(0.4) * std::cos(0.3)).epsilon(1e-13));
}
