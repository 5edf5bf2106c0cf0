#pragma once

/// @file tridiagonal.hpp
/// @brief Thomas elimination for real tridiagonal matrices with real or complex right-hand sides.

#include "shearflow/errors.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace shearflow {

/// Solves a tridiagonal system in place. `sub[0]` and `super[n-1]` are ignored.
/// Throws NumericalFailure on a zero pivot.
template <typename T>
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag, std::span<const double> super,
                       std::span<T> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) {
        return;
    }
    std::vector<double> c(n);
    double pivot = diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
        throw NumericalFailure("tridiagonal solve: zero pivot");
    }
    c[0] = super[0] / pivot;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - sub[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw NumericalFailure("tridiagonal solve: zero pivot");
        }
        c[i] = i + 1 < n ? super[i] / pivot : 0.0;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

template <typename T>
void solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag, const std::vector<double>& super,
                       std::span<T> rhs) {
    solve_tridiagonal<T>(std::span<const double>(sub), std::span<const double>(diag), std::span<const double>(super), rhs);
}

} // namespace shearflow
