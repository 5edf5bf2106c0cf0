#pragma once

/// @file fft.hpp
/// @brief Thin RAII wrappers around FFTW real-to-complex transforms.
///
/// Plans are created once per size (guarded by a mutex) and executed through
/// the new-array interface, so a plan object may be shared between threads.
/// Forward transforms are normalized: coefficients c_k satisfy
/// u(x) = sum_k c_k exp(i k.x).

#include <complex>
#include <span>

namespace shearflow::fft {

using Complex = std::complex<double>;

/// 2D transform of an n x n real grid stored row-major (row = second
/// coordinate). Spectral layout: n rows x (n/2 + 1) columns.
class Plan2D {
public:
    static const Plan2D& get(int n);

    [[nodiscard]] int size() const { return n_; }
    [[nodiscard]] int spectral_cols() const { return n_ / 2 + 1; }

    void forward(std::span<const double> grid, std::span<Complex> spectrum) const;
    void inverse(std::span<const Complex> spectrum, std::span<double> grid) const;

    Plan2D(const Plan2D&) = delete;
    Plan2D& operator=(const Plan2D&) = delete;
    ~Plan2D();

private:
    explicit Plan2D(int n);
    int n_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Batched 1D transforms along rows of a rows x n real array.
class PlanRows {
public:
    static const PlanRows& get(int n, int rows);

    [[nodiscard]] int size() const { return n_; }
    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int spectral_cols() const { return n_ / 2 + 1; }

    void forward(std::span<const double> grid, std::span<Complex> spectrum) const;
    void inverse(std::span<const Complex> spectrum, std::span<double> grid) const;

    PlanRows(const PlanRows&) = delete;
    PlanRows& operator=(const PlanRows&) = delete;
    ~PlanRows();

private:
    PlanRows(int n, int rows);
    int n_;
    int rows_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

} // namespace shearflow::fft
