#include "shearflow/constitutive.hpp"

#include "shearflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace shearflow {

namespace {

bool finite(const SymTensor2& d) {
    return std::isfinite(d.d11) && std::isfinite(d.d12) && std::isfinite(d.d22);
}

bool finite(const Tensor2& d) {
    return std::all_of(d.a.begin(), d.a.end(), [](double v) { return std::isfinite(v); });
}

void require_finite(const SymTensor2& d, const char* what) {
    if (!finite(d)) {
        throw InvalidInput(std::string(what) + ": non-finite tensor component");
    }
}

} // namespace

void StressParams::validate(bool allow_zero_nu0) const {
    std::ostringstream msg;
    if (!(p > 1.0 && p <= 2.0)) {
        msg << "p must lie in (1, 2], got " << p << "; ";
    }
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        msg << "delta must be >= 0, got " << delta << "; ";
    }
    if (!(nu1 >= 0.0) || !std::isfinite(nu1)) {
        msg << "nu1 must be >= 0, got " << nu1 << "; ";
    }
    if (!std::isfinite(nu0) || nu0 < 0.0 || (nu0 == 0.0 && !allow_zero_nu0)) {
        msg << "nu0 must be > 0 (nu0 = 0 only in the explicit torus mode), got " << nu0 << "; ";
    }
    const std::string s = msg.str();
    if (!s.empty()) {
        throw InvalidInput("invalid stress parameters: " + s.substr(0, s.size() - 2));
    }
}

double SymTensor2::frobenius_norm() const {
    return std::sqrt(d11 * d11 + 2.0 * d12 * d12 + d22 * d22);
}

double contract(const SymTensor2& a, const SymTensor2& b) {
    return a.d11 * b.d11 + 2.0 * a.d12 * b.d12 + a.d22 * b.d22;
}

double stress_weight(double t, const StressParams& params) {
    if (params.p == 2.0) {
        return 1.0;
    }
    const double base = params.delta + t;
    if (base == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::pow(base, params.p - 2.0);
}

SymTensor2 stress(const SymTensor2& d, const StressParams& params) {
    require_finite(d, "stress");
    const double norm = d.frobenius_norm();
    if (norm == 0.0) {
        return {};
    }
    return stress_weight(norm, params) * d;
}

SymTensor2 stress(const Tensor2& d, const StressParams& params) {
    if (!finite(d)) {
        throw InvalidInput("stress: non-finite tensor component");
    }
    return stress(d.sym(), params);
}

StressJacobian stress_jacobian(const Tensor2& d, const StressParams& params) {
    if (!finite(d)) {
        throw InvalidInput("stress_jacobian: non-finite tensor component");
    }
    const SymTensor2 ds = d.sym();
    const double norm = ds.frobenius_norm();
    if (params.delta == 0.0 && norm == 0.0) {
        throw SingularPoint("stress Jacobian does not exist at D = 0 when delta = 0");
    }
    const double w = stress_weight(norm, params);
    // (p-2)(delta+|D|)^(p-3)/|D|; the product with D_kl D_ij vanishes with |D|.
    const double g = norm > 0.0 ? (params.p - 2.0) * w / (params.delta + norm) / norm : 0.0;
    const std::array<double, 4> dsym{ds.d11, ds.d12, ds.d12, ds.d22};

    StressJacobian jac{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    const double sym_delta = 0.5 * (double(i == k && j == l) + double(i == l && j == k));
                    const auto row = static_cast<std::size_t>(2 * i + j);
                    const auto col = static_cast<std::size_t>(2 * k + l);
                    jac[row][col] = w * sym_delta + g * dsym[col] * dsym[row];
                }
            }
        }
    }
    return jac;
}

DirectionalDerivative stress_directional_derivative(const SymTensor2& d, const SymTensor2& c,
                                                    const StressParams& params) {
    require_finite(d, "stress_directional_derivative");
    require_finite(c, "stress_directional_derivative");
    const Tensor2 dfull{{d.d11, d.d12, d.d12, d.d22}};
    const StressJacobian jac = stress_jacobian(dfull, params);
    const std::array<double, 4> cfull{c.d11, c.d12, c.d12, c.d22};

    DirectionalDerivative out;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t s = 0; s < 4; ++s) {
            out.quadratic_form += jac[r][s] * cfull[r] * cfull[s];
        }
    }
    out.weight = stress_weight(d.frobenius_norm(), params);

    const double c2 = contract(c, c);
    const double slack = 1e-12 * out.weight * std::max(c2, 1e-300);
    out.coercive = out.quadratic_form >= (params.p - 1.0) * out.weight * c2 - slack;

    double max_entry = 0.0;
    for (const auto& row : jac) {
        for (double v : row) {
            max_entry = std::max(max_entry, std::abs(v));
        }
    }
    out.entry_bound = max_entry <= (3.0 - params.p) * out.weight * (1.0 + 1e-12);
    return out;
}

MonotonicityBracket monotonicity_bracket(const Tensor2& a, const Tensor2& b, const StressParams& params) {
    const SymTensor2 as = a.sym();
    const SymTensor2 bs = b.sym();
    const SymTensor2 ds = stress(as, params) - stress(bs, params);
    const SymTensor2 diff = as - bs;

    MonotonicityBracket out;
    out.lhs_dot = contract(ds, diff);
    out.lhs_norm = ds.frobenius_norm();
    const double dn = diff.frobenius_norm();
    if (dn == 0.0) {
        return out;
    }
    const double w = stress_weight(as.frobenius_norm() + bs.frobenius_norm(), params);
    out.equivalent_norm = w * dn;
    out.equivalent_dot = w * dn * dn;
    return out;
}

double potential_scalar(double t, const StressParams& params) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidInput("potential_scalar: argument must be finite and >= 0");
    }
    const double p = params.p;
    const double delta = params.delta;
    if (t == 0.0) {
        return 0.0;
    }
    if (delta == 0.0) {
        return std::pow(t, p) / p;
    }
    const double x = t / delta;
    if (x < 0.5) {
        // delta^p * sum_n binom(p-2, n) x^(n+2) / (n+2); avoids cancellation for t << delta
        double sum = 0.0;
        double binom = 1.0;
        double xpow = x * x;
        for (int n = 0; n < 200; ++n) {
            const double term = binom * xpow / (n + 2);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) {
                break;
            }
            binom *= (p - 2.0 - n) / (n + 1);
            xpow *= x;
        }
        return std::pow(delta, p) * sum;
    }
    const double s = delta + t;
    return std::pow(s, p) / p - delta * std::pow(s, p - 1.0) / (p - 1.0)
        - std::pow(delta, p) * (1.0 / p - 1.0 / (p - 1.0));
}

} // namespace shearflow
