#pragma once

#include "shearflow/constitutive.hpp"

#include <array>
#include <vector>

namespace shearflow {

/// Velocity and its first and second derivatives at quadrature nodes.
struct PointwiseState {
    std::vector<double> weight;                ///< quadrature weights, sum = |domain|
    std::array<std::vector<double>, 2> u;
    std::array<std::vector<double>, 4> grad;   ///< d1u1, d2u1, d1u2, d2u2
    std::array<std::vector<double>, 8> hess;   ///< index 4*c + 2*a + b -> d_a d_b u_c

    [[nodiscard]] std::size_t size() const { return weight.size(); }
    [[nodiscard]] SymTensor2 sym_grad(std::size_t i) const;
    /// d_axis (Du) at node i.
    [[nodiscard]] SymTensor2 sym_grad_derivative(std::size_t i, int axis) const;
    [[nodiscard]] bool has_hessian() const { return !hess[0].empty(); }
};

} // namespace shearflow
