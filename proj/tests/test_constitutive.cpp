#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "shearflow/constitutive.hpp"
#include "shearflow/errors.hpp"
#include "support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace shearflow;
using testing::rel_diff;

namespace {

Tensor2 full(const SymTensor2& s) { return Tensor2{{s.d11, s.d12, s.d12, s.d22}}; }

SymTensor2 random_sym(std::mt19937_64& rng, double range = 5.0) {
    std::uniform_real_distribution<double> u(-range, range);
    return {u(rng), u(rng), u(rng)};
}

Tensor2 random_full(std::mt19937_64& rng, double range = 5.0) {
    std::uniform_real_distribution<double> u(-range, range);
    return Tensor2{{u(rng), u(rng), u(rng), u(rng)}};
}

SymTensor2 rotate(const SymTensor2& d, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    // R D R^T with R = [[c, -s], [s, c]]
    const double a11 = c * d.d11 - s * d.d12, a12 = c * d.d12 - s * d.d22;
    const double a21 = s * d.d11 + c * d.d12, a22 = s * d.d12 + c * d.d22;
    return {a11 * c - a12 * s, a11 * s + a12 * c, a21 * s + a22 * c};
}

double fd_quadratic_form(const SymTensor2& d, const SymTensor2& c, const StressParams& params, double h) {
    const SymTensor2 sp = stress(d + h * c, params);
    const SymTensor2 sm = stress(d - h * c, params);
    return contract((1.0 / (2.0 * h)) * (sp - sm), c);
}

} // namespace

TEST_CASE("stress: zero tensor maps to zero") {
    for (double p : {1.2, 1.5, 2.0}) {
        for (double delta : {0.0, 0.3}) {
            const auto s = stress(SymTensor2{}, StressParams{p, delta, 1.0, 1.0});
            CHECK(s.d11 == 0.0);
            CHECK(s.d12 == 0.0);
            CHECK(s.d22 == 0.0);
        }
    }
}

TEST_CASE("stress: p = 2 is the identity") {
    const SymTensor2 d{1.0, 2.0, -1.0};
    const auto s = stress(d, StressParams{2.0, 3.0, 1.0, 1.0});
    CHECK(s.d11 == 1.0);
    CHECK(s.d12 == 2.0);
    CHECK(s.d22 == -1.0);
}

TEST_CASE("stress: p = 1.5, delta = 1, D = diag(1, -1)") {
    const SymTensor2 d{1.0, 0.0, -1.0};
    const auto s = stress(d, StressParams{1.5, 1.0, 1.0, 1.0});
    const double w = 1.0 / std::sqrt(1.0 + std::sqrt(2.0));
    CHECK(s.d11 == doctest::Approx(w).epsilon(1e-14));
    CHECK(s.d22 == doctest::Approx(-w).epsilon(1e-14));
    CHECK(s.d11 == doctest::Approx(0.6436).epsilon(1e-4));
}

TEST_CASE("stress: non-finite input is rejected") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(stress(SymTensor2{nan, 0.0, 0.0}, StressParams{1.5, 0.1, 1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(stress(SymTensor2{0.0, std::numeric_limits<double>::infinity(), 0.0}, StressParams{}), InvalidInput);
}

TEST_CASE("stress params: admissible range") {
    CHECK_THROWS_AS(StressParams({2.5, 0.0, 1.0, 1.0}).validate(), InvalidInput);
    CHECK_THROWS_AS(StressParams({1.0, 0.0, 1.0, 1.0}).validate(), InvalidInput);
    CHECK_THROWS_AS(StressParams({1.5, -1.0, 1.0, 1.0}).validate(), InvalidInput);
    CHECK_THROWS_AS(StressParams({1.5, 0.0, 0.0, 1.0}).validate(), InvalidInput);
    CHECK_NOTHROW(StressParams({1.5, 0.0, 0.0, 1.0}).validate(true));
}

TEST_CASE("stress: isotropy under rotations") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (double p : {1.5, 1.75, 2.0}) {
        const StressParams params{p, 0.1, 1.0, 1.0};
        for (int i = 0; i < 1000; ++i) {
            const auto d = random_sym(rng);
            const double th = angle(rng);
            const auto lhs = stress(rotate(d, th), params);
            const auto rhs = rotate(stress(d, params), th);
            const double scale = stress(d, params).frobenius_norm();
            CHECK((lhs - rhs).frobenius_norm() <= 1e-12 * scale);
        }
    }
}

TEST_CASE("directional derivative: C = 0 gives 0") {
    const auto r = stress_directional_derivative(SymTensor2{1.0, 0.5, -1.0}, SymTensor2{}, StressParams{1.5, 0.5, 1.0, 1.0});
    CHECK(r.quadratic_form == 0.0);
    CHECK(r.operator_bound_ok());
}

TEST_CASE("directional derivative: p = 2 equals |C|^2") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto d = random_sym(rng);
        const auto c = random_sym(rng);
        const auto r = stress_directional_derivative(d, c, StressParams{2.0, 0.7, 1.0, 1.0});
        CHECK(r.quadratic_form == doctest::Approx(contract(c, c)).epsilon(1e-13));
        CHECK(r.weight == 1.0);
        CHECK(r.operator_bound_ok());
    }
}

TEST_CASE("directional derivative: finite-difference oracle and bounds, p = 1.5, delta = 0.5") {
    std::mt19937_64 rng(5);
    const StressParams params{1.5, 0.5, 1.0, 1.0};
    for (int i = 0; i < 2000; ++i) {
        const auto d = random_sym(rng);
        const auto c = random_sym(rng);
        const auto r = stress_directional_derivative(d, c, params);
        const double fd = fd_quadratic_form(d, c, params, 1e-6);
        CHECK(rel_diff(r.quadratic_form, fd) <= 1e-5);
        const double m = std::pow(params.delta + d.frobenius_norm(), params.p - 2.0);
        CHECK(r.weight == doctest::Approx(m).epsilon(1e-14));
        CHECK(r.quadratic_form >= (params.p - 1.0) * m * contract(c, c) * (1.0 - 1e-12));
        CHECK(r.operator_bound_ok());
    }
}

TEST_CASE("directional derivative: singular point") {
    CHECK_THROWS_AS(stress_directional_derivative(SymTensor2{}, SymTensor2{1.0, 0.0, 0.0}, StressParams{1.5, 0.0, 1.0, 1.0}),
                    SingularPoint);
    CHECK_THROWS_AS(stress_jacobian(Tensor2{}, StressParams{1.5, 0.0, 1.0, 1.0}), SingularPoint);
}

TEST_CASE("jacobian: finite differences on general tensors") {
    std::mt19937_64 rng(7);
    const double h = 1e-6;
    for (double p : {1.5, 1.75, 2.0}) {
        for (double delta : {0.0, 0.1, 1.0}) {
            const StressParams params{p, delta, 1.0, 1.0};
            for (int n = 0; n < 200; ++n) {
                const Tensor2 d = random_full(rng);
                const auto jac = stress_jacobian(d, params);
                double scale = 0.0;
                for (const auto& row : jac) {
                    for (double v : row) scale = std::max(scale, std::abs(v));
                }
                for (int kl = 0; kl < 4; ++kl) {
                    Tensor2 dp = d, dm = d;
                    dp.a[static_cast<std::size_t>(kl)] += h;
                    dm.a[static_cast<std::size_t>(kl)] -= h;
                    const auto sp = full(stress(dp, params));
                    const auto sm = full(stress(dm, params));
                    for (int ij = 0; ij < 4; ++ij) {
                        const double fd = (sp.a[static_cast<std::size_t>(ij)] - sm.a[static_cast<std::size_t>(ij)]) / (2 * h);
                        CHECK(std::abs(fd - jac[static_cast<std::size_t>(ij)][static_cast<std::size_t>(kl)]) <= 1e-5 * scale);
                    }
                }
            }
        }
    }
}

TEST_CASE("coercivity and entry bound on random pairs") {
    std::mt19937_64 rng(13);
    int failures = 0;
    for (double p : {1.5, 1.75, 2.0}) {
        for (double delta : {0.0, 0.1, 1.0}) {
            const StressParams params{p, delta, 1.0, 1.0};
            for (int i = 0; i < 10000; ++i) {
                const auto r = stress_directional_derivative(random_sym(rng), random_sym(rng), params);
                failures += r.operator_bound_ok() ? 0 : 1;
            }
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("monotonicity bracket: A = B") {
    const Tensor2 a{{1.0, 2.0, 0.5, -1.0}};
    const auto m = monotonicity_bracket(a, a, StressParams{1.5, 0.1, 1.0, 1.0});
    CHECK(m.lhs_dot == 0.0);
    CHECK(m.lhs_norm == 0.0);
    CHECK(m.equivalent_dot == 0.0);
    CHECK(m.equivalent_norm == 0.0);
}

TEST_CASE("monotonicity bracket: p = 2 ratios are 1") {
    std::mt19937_64 rng(17);
    for (double delta : {0.0, 0.1, 1.0, 10.0}) {
        for (int i = 0; i < 1000; ++i) {
            const auto m = monotonicity_bracket(random_full(rng), random_full(rng), StressParams{2.0, delta, 1.0, 1.0});
            CHECK(std::abs(m.lhs_dot / m.equivalent_dot - 1.0) <= 1e-12);
            CHECK(std::abs(m.lhs_norm / m.equivalent_norm - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("monotonicity bracket: p = 1.5 ratios are bounded independently of delta") {
    std::mt19937_64 rng(19);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double delta : {0.0, 0.1, 1.0, 10.0}) {
        double dlo = std::numeric_limits<double>::infinity(), dhi = 0.0;
        for (int i = 0; i < 25000; ++i) {
            const auto m = monotonicity_bracket(random_full(rng), random_full(rng), StressParams{1.5, delta, 1.0, 1.0});
            if (m.equivalent_dot == 0.0) continue;
            const double r_dot = m.lhs_dot / m.equivalent_dot;
            const double r_norm = m.lhs_norm / m.equivalent_norm;
            dlo = std::min({dlo, r_dot, r_norm});
            dhi = std::max({dhi, r_dot, r_norm});
        }
        // Lower bound (p - 1) 2^(p-2)-type constants and upper bound of a few units.
        CHECK(dlo > 0.1);
        CHECK(dhi < 10.0);
        lo = std::min(lo, dlo);
        hi = std::max(hi, dhi);
    }
    MESSAGE("empirical c0 = " << lo << ", c1 = " << hi);
}

TEST_CASE("potential: closed forms") {
    CHECK(potential_scalar(3.0, StressParams{2.0, 0.0, 1.0, 1.0}) == doctest::Approx(4.5).epsilon(1e-15));
    for (double p : {1.2, 1.5, 2.0}) {
        CHECK(potential_scalar(0.0, StressParams{p, 0.4, 1.0, 1.0}) == 0.0);
    }
    CHECK_THROWS_AS(potential_scalar(-1.0, StressParams{1.5, 0.1, 1.0, 1.0}), InvalidInput);
}

TEST_CASE("potential: quadrature oracle") {
    for (double p : {1.2, 1.5, 1.75, 2.0}) {
        for (double delta : {0.0, 0.1, 1.0}) {
            for (double t : {0.1, 1.0, 7.5}) {
                const StressParams params{p, delta, 1.0, 1.0};
                const double q = testing::adaptive_simpson(
                    [&](double s) { return s == 0.0 ? 0.0 : std::pow(delta + s, p - 2.0) * s; }, 0.0, t, 1e-13);
                CHECK(std::abs(potential_scalar(t, params) - q) <= 1e-10 * std::max(1.0, q));
            }
        }
    }
    CHECK(potential_scalar(1.0, StressParams{1.5, 1.0, 1.0, 1.0}) == doctest::Approx(0.3905).epsilon(1e-4));
}

TEST_CASE("potential: derivative is the stress magnitude") {
    const StressParams params{1.6, 0.2, 1.0, 1.0};
    for (double t : {0.05, 0.5, 3.0}) {
        const double h = 1e-6;
        const double dm = (potential_scalar(t + h, params) - potential_scalar(t - h, params)) / (2 * h);
        CHECK(dm == doctest::Approx(std::pow(params.delta + t, params.p - 2.0) * t).epsilon(1e-8));
    }
}

TEST_CASE("power relation band: (delta^(p/2) + t^(p/2)) vs (delta + t)^((p-2)/2) t + delta^(p/2)") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (double p : {1.25, 1.5, 1.75, 2.0}) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double delta = u(rng), t = u(rng);
            const double num = std::pow(delta, p / 2) + std::pow(t, p / 2);
            const double den = std::pow(delta + t, (p - 2) / 2) * t + std::pow(delta, p / 2);
            if (den == 0.0) continue;
            lo = std::min(lo, num / den);
            hi = std::max(hi, num / den);
        }
        CHECK(lo > 0.5);
        CHECK(hi < 4.0);
    }
}
