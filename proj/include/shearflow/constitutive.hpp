#pragma once

/// @file constitutive.hpp
/// @brief Power-law extra stress S(D) = (delta + |D|)^(p-2) D and its properties.
///
/// All tensors are 2x2. Norms are Frobenius norms. The stress acts on the
/// symmetric part of its argument; the full-tensor overloads symmetrize first.

#include <array>

namespace shearflow {

/// Constitutive constants of the shear-thinning model.
struct StressParams {
    double p = 2.0;      ///< power-law exponent, 1 < p <= 2
    double delta = 0.0;  ///< regularization, >= 0
    double nu0 = 1.0;    ///< Newtonian viscosity
    double nu1 = 0.0;    ///< power-law viscosity

    /// Throws InvalidInput when the constants leave the admissible range.
    /// nu0 = 0 is accepted only with allow_zero_nu0.
    void validate(bool allow_zero_nu0 = false) const;
};

/// Symmetric 2x2 tensor stored by its upper triangle.
struct SymTensor2 {
    double d11 = 0.0;
    double d12 = 0.0;
    double d22 = 0.0;

    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double trace() const { return d11 + d22; }

    friend SymTensor2 operator+(const SymTensor2& a, const SymTensor2& b) {
        return {a.d11 + b.d11, a.d12 + b.d12, a.d22 + b.d22};
    }
    friend SymTensor2 operator-(const SymTensor2& a, const SymTensor2& b) {
        return {a.d11 - b.d11, a.d12 - b.d12, a.d22 - b.d22};
    }
    friend SymTensor2 operator*(double s, const SymTensor2& a) {
        return {s * a.d11, s * a.d12, s * a.d22};
    }
};

/// Full contraction A:B of two symmetric tensors (off-diagonal counted twice).
double contract(const SymTensor2& a, const SymTensor2& b);

/// General 2x2 tensor, row-major: {a11, a12, a21, a22}.
struct Tensor2 {
    std::array<double, 4> a{};

    [[nodiscard]] double operator()(int i, int j) const { return a[static_cast<std::size_t>(2 * i + j)]; }
    [[nodiscard]] SymTensor2 sym() const { return {a[0], 0.5 * (a[1] + a[2]), a[3]}; }
};

/// Scalar weight (delta + t)^(p-2). For delta = t = 0 returns +inf when p < 2.
double stress_weight(double t, const StressParams& params);

/// S(D) = (delta + |D|)^(p-2) D. At delta = 0, D = 0 the limit value 0 is returned.
SymTensor2 stress(const SymTensor2& d, const StressParams& params);
SymTensor2 stress(const Tensor2& d, const StressParams& params);

/// Jacobian dS_ij / dD_kl over the space of general 2x2 tensors, index
/// [2*i+j][2*k+l].
using StressJacobian = std::array<std::array<double, 4>, 4>;

StressJacobian stress_jacobian(const Tensor2& d, const StressParams& params);

struct DirectionalDerivative {
    double quadratic_form = 0.0;  ///< sum_{ijkl} dS_ij/dD_kl C_ij C_kl
    double weight = 0.0;          ///< (delta + |D|)^(p-2)
    bool coercive = false;        ///< quadratic_form >= (p-1) weight |C|^2
    bool entry_bound = false;     ///< |dS_ij/dD_kl| <= (3-p) weight for all entries
    [[nodiscard]] bool operator_bound_ok() const { return coercive && entry_bound; }
};

/// Second variation of the stress in direction C. Throws SingularPoint at
/// delta = 0, D = 0.
DirectionalDerivative stress_directional_derivative(const SymTensor2& d, const SymTensor2& c,
                                                    const StressParams& params);

/// Monotonicity and growth quantities comparing S(A) and S(B).
struct MonotonicityBracket {
    double lhs_dot = 0.0;         ///< (S(A)-S(B)) : (A^sym-B^sym)
    double lhs_norm = 0.0;        ///< |S(A)-S(B)|
    double equivalent_dot = 0.0;  ///< (delta+|A^sym|+|B^sym|)^(p-2) |A^sym-B^sym|^2
    double equivalent_norm = 0.0; ///< (delta+|A^sym|+|B^sym|)^(p-2) |A^sym-B^sym|
};

MonotonicityBracket monotonicity_bracket(const Tensor2& a, const Tensor2& b, const StressParams& params);

/// M(t) = int_0^t (delta + s)^(p-2) s ds.
double potential_scalar(double t, const StressParams& params);

} // namespace shearflow
