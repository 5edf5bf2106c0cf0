#include "shearflow/channel_diagnostics.hpp"

#include "shearflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shearflow {

namespace {

/// (p-2)(delta+|D|)^(p-3)/|D|, zero where |D| = 0 or p = 2.
double weight_slope(const SymTensor2& d, const StressParams& params) {
    const double n = d.frobenius_norm();
    if (n == 0.0 || params.p == 2.0) {
        return 0.0;
    }
    return (params.p - 2.0) * std::pow(params.delta + n, params.p - 3.0) / n;
}

bool interior(std::size_t idx, int n1, int n2) {
    const auto row = static_cast<int>(idx / static_cast<std::size_t>(n1));
    return row > 0 && row < n2;
}

/// d1 pi averaged from the two neighbouring centres onto interior nodes.
std::vector<double> pressure_dx1_nodes(const ChannelField& u) {
    const int n1 = u.n1();
    const int n2 = u.n2();
    const auto centres = channel_dx1(u, u.pressure_spectrum(), n2, 1);
    std::vector<double> out(static_cast<std::size_t>((n2 + 1) * n1), 0.0);
    for (int j = 1; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            out[static_cast<std::size_t>(j * n1 + i)] =
                0.5 * (centres[static_cast<std::size_t>((j - 1) * n1 + i)] + centres[static_cast<std::size_t>(j * n1 + i)]);
        }
    }
    return out;
}

} // namespace

double D2StarField::norm_squared(std::size_t i) const {
    return d11u1[i] * d11u1[i] + 2.0 * d12u1[i] * d12u1[i] + d11u2[i] * d11u2[i] + 2.0 * d12u2[i] * d12u2[i]
        + d22u2[i] * d22u2[i];
}

D2StarField d2star_field(const PointwiseState& s) {
    if (!s.has_hessian()) {
        throw InvalidInput("d2star_field: second derivatives required");
    }
    return {s.hess[0], s.hess[1], s.hess[4], s.hess[5], s.hess[7]};
}

double d2star_l2(const PointwiseState& s) {
    const D2StarField d = d2star_field(s);
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sum += s.weight[i] * d.norm_squared(i);
    }
    return std::sqrt(sum);
}

double d22u1_l2(const PointwiseState& s) {
    if (!s.has_hessian()) {
        throw InvalidInput("d22u1_l2: second derivatives required");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sum += s.weight[i] * s.hess[3][i] * s.hess[3][i];
    }
    return std::sqrt(sum);
}

Alpha1Field alpha1_field(const PointwiseState& s, const StressParams& params) {
    if (params.p < 1.5 || params.p > 2.0) {
        throw DomainError("alpha1: requires p in [3/2, 2], got p = " + std::to_string(params.p));
    }
    Alpha1Field out;
    out.values.resize(s.size());
    out.lower_bound.resize(s.size());
    out.min = std::numeric_limits<double>::infinity();
    out.min_lower_bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const SymTensor2 d = s.sym_grad(i);
        const double n = d.frobenius_norm();
        if (params.delta == 0.0 && n == 0.0 && params.p != 2.0) {
            throw SingularPoint("alpha1: delta = 0 and Du = 0 at a node");
        }
        const double w = stress_weight(n, params);
        out.values[i] = params.nu0 + params.nu1 * (0.5 * w + weight_slope(d, params) * d.d12 * d.d12);
        out.lower_bound[i] = params.nu0 + params.nu1 * (params.p - 1.5) * w;
        out.min = std::min(out.min, out.values[i]);
        out.min_lower_bound = std::min(out.min_lower_bound, out.lower_bound[i]);
    }
    return out;
}

Alpha1Field alpha1_field(const ChannelField& u, const StressParams& params) {
    return alpha1_field(channel_pointwise(u, false), params);
}

RecoveryResult recover_d22u1(const ChannelField& u, const ChannelField* ut, std::span<const double> f1,
                             const StressParams& params, bool with_convection) {
    const PointwiseState s = channel_pointwise(u);
    const Alpha1Field alpha = alpha1_field(s, params);
    const std::size_t size = s.size();
    if (!f1.empty() && f1.size() != size) {
        throw InvalidInput("recover_d22u1: forcing grid size mismatch");
    }
    const std::vector<double> ut1 = ut ? ut->nodes(0) : std::vector<double>(size, 0.0);
    const std::vector<double> dpi1 = pressure_dx1_nodes(u);
    const int n1 = u.n1();
    const int n2 = u.n2();

    RecoveryResult out;
    out.recovered.assign(size, 0.0);
    out.direct.assign(size, 0.0);
    out.f1.assign(size, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const SymTensor2 d = s.sym_grad(i);
        const SymTensor2 d1d = s.sym_grad_derivative(i, 0);
        const double w = stress_weight(d.frobenius_norm(), params);
        const double g = weight_slope(d, params);
        const double u1_11 = s.hess[0][i];
        const double u1_12 = s.hess[1][i];
        const double u2_12 = s.hess[5][i];
        const double u2_22 = s.hess[7][i];
        const double f = (params.nu0 + params.nu1 * w) * u1_11 + 0.5 * params.nu1 * w * u2_12
            + params.nu1 * g
                * (contract(d, d1d) * d.d11 + d.d11 * d.d12 * u1_12 + d.d12 * d.d12 * u2_12 + d.d22 * d.d12 * u2_22);
        out.f1[i] = f;
        if (!interior(i, n1, n2)) {
            continue;
        }
        if (!(alpha.values[i] > 0.0)) {
            throw NumericalFailure("recover_d22u1: alpha1 is not positive");
        }
        double rhs = -f + ut1[i] + dpi1[i] - (f1.empty() ? 0.0 : f1[i]);
        if (with_convection) {
            rhs += s.u[0][i] * s.grad[0][i] + s.u[1][i] * s.grad[1][i];
        }
        out.recovered[i] = rhs / alpha.values[i];
        out.direct[i] = s.hess[3][i];
        const double diff = out.recovered[i] - out.direct[i];
        sum += s.weight[i] * diff * diff;

        const double d2plus = std::sqrt(u1_11 * u1_11 + 2.0 * u1_12 * u1_12 + s.hess[4][i] * s.hess[4][i]
                                            + 2.0 * u2_12 * u2_12 + u2_22 * u2_22);
        const double scale = (params.nu0 + params.nu1 * (params.p - 1.5) * w) * d2plus;
        if (scale > 0.0) {
            out.f1_bound_ratio = std::max(out.f1_bound_ratio, std::abs(f) / scale);
        }
    }
    out.residual = std::sqrt(sum);
    return out;
}

PressureDiagnostics pressure_gradient_diagnostics(const ChannelField& u, const ChannelField* ut,
                                                  std::span<const double> f1, std::span<const double> f2,
                                                  const StressParams& params) {
    const int n1 = u.n1();
    const int n2 = u.n2();
    const double h = u.h2();
    const double cell = u.h1() * h;
    PressureDiagnostics out;

    const auto dpi1 = channel_dx1(u, u.pressure_spectrum(), n2, 1);
    double mean = 0.0;
    for (double v : dpi1) mean += v;
    mean /= static_cast<double>(dpi1.size());
    double sum1 = 0.0;
    double sum_g = 0.0;
    for (double v : dpi1) {
        sum1 += cell * v * v;
        sum_g += cell * (v - mean) * (v - mean);
    }
    out.dpi1_l2 = std::sqrt(sum1);

    const auto pi = u.pressure();
    double sum2 = 0.0;
    for (int j = 1; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const double d = (pi[static_cast<std::size_t>(j * n1 + i)] - pi[static_cast<std::size_t>((j - 1) * n1 + i)]) / h;
            sum2 += cell * d * d;
        }
    }
    out.dpi2_l2 = std::sqrt(sum2);

    if (!ut) {
        out.necas_ratio = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const PointwiseState s = channel_pointwise(u);
    const std::array<std::vector<double>, 2> ut_nodes{ut->nodes(0), ut->nodes(1)};
    double sum_big = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const SymTensor2 d = s.sym_grad(i);
        const SymTensor2 d1d = s.sym_grad_derivative(i, 0);
        const double w = stress_weight(d.frobenius_norm(), params);
        const double gs = weight_slope(d, params) * contract(d, d1d);
        const SymTensor2 d1s = w * d1d + gs * d;
        const double stress[2][2] = {{d1s.d11, d1s.d12}, {d1s.d12, d1s.d22}};
        const double fv[2] = {f1.empty() ? 0.0 : f1[i], f2.empty() ? 0.0 : f2[i]};
        double g2 = 0.0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const auto ua = static_cast<std::size_t>(a);
                const auto ub = static_cast<std::size_t>(b);
                double v = params.nu0 * s.hess[static_cast<std::size_t>(4 * a + b)][i] + params.nu1 * stress[a][b];
                if (b == 0) {
                    v -= ut_nodes[ua][i] - fv[a];
                }
                v -= s.grad[2 * ua][i] * s.u[ub][i] + s.u[ua][i] * s.grad[2 * ub][i];
                g2 += v * v;
            }
        }
        sum_big += s.weight[i] * g2;
    }
    if (sum_big > 0.0) {
        out.necas_ratio = std::sqrt(sum_g / sum_big);
    } else {
        out.necas_ratio = sum_g > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return out;
}

} // namespace shearflow
