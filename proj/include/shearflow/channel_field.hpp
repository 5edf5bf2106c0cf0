#pragma once

/// @file channel_field.hpp
/// @brief Velocity and pressure on the strip ]-1,1[ x ]-1,1[, periodic in x1.
///
/// x1 is spectral with period 2 (wavenumbers kappa = pi k); x2 uses n2 + 1
/// uniform nodes including both walls. Velocity lives on the nodes, pressure
/// at the n2 cell centres. Each row of the spectral arrays holds the half
/// spectrum (n1/2 + 1 coefficients) of one x2 level.

#include "shearflow/constitutive.hpp"
#include "shearflow/pointwise.hpp"

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace shearflow {

using Complex = std::complex<double>;

class ChannelField {
public:
    ChannelField() : ChannelField(4, 4) {}
    ChannelField(int n1, int n2);

    /// From node values (row-major, (n2+1) x n1). Wall rows are set to zero,
    /// the x1 Nyquist mode removed; the result is not projected.
    static ChannelField from_nodes(int n1, int n2, std::span<const double> u1, std::span<const double> u2);

    [[nodiscard]] int n1() const { return n1_; }
    [[nodiscard]] int n2() const { return n2_; }
    [[nodiscard]] int cols() const { return n1_ / 2 + 1; }
    [[nodiscard]] int node_rows() const { return n2_ + 1; }
    [[nodiscard]] double h1() const { return 2.0 / n1_; }
    [[nodiscard]] double h2() const { return 2.0 / n2_; }
    [[nodiscard]] double x1(int i) const { return -1.0 + h1() * i; }
    [[nodiscard]] double x2(int j) const { return -1.0 + h2() * j; }
    [[nodiscard]] double center(int j) const { return -1.0 + h2() * (j + 0.5); }
    [[nodiscard]] double kappa(int k) const;

    /// Half spectra: velocity (n2+1) x cols, pressure n2 x cols.
    [[nodiscard]] std::span<const Complex> spectrum(int component) const { return spec_[static_cast<std::size_t>(component)]; }
    std::span<Complex> spectrum_mut(int component) { return spec_[static_cast<std::size_t>(component)]; }
    [[nodiscard]] std::span<const Complex> pressure_spectrum() const { return pressure_; }
    std::span<Complex> pressure_spectrum_mut() { return pressure_; }

    [[nodiscard]] std::vector<double> nodes(int component) const;
    [[nodiscard]] std::vector<double> pressure() const;

    /// Exact Fourier sum in x1, not-a-knot cubic spline in x2. Returns zero
    /// outside |x2| <= 1 and sets `clamped` if given.
    [[nodiscard]] std::array<double, 2> evaluate(double x1, double x2, bool* clamped = nullptr) const;

    /// Largest |u| on the wall rows.
    [[nodiscard]] double wall_defect() const;
    /// L2 norm of the discrete (centre) divergence.
    [[nodiscard]] double divergence_l2() const;
    /// Zeroes x1 modes with |k| > cutoff.
    void truncate(int cutoff);

    friend ChannelField operator+(const ChannelField& a, const ChannelField& b);
    friend ChannelField operator-(const ChannelField& a, const ChannelField& b);
    friend ChannelField operator*(double s, const ChannelField& a);

private:
    int n1_;
    int n2_;
    std::array<std::vector<Complex>, 2> spec_;
    std::vector<Complex> pressure_;
};

/// Centre divergence per mode: i kappa (u1[j]+u1[j+1])/2 + (u2[j+1]-u2[j])/h.
std::vector<Complex> channel_divergence(const ChannelField& u);

/// One row of the centre Poisson operator div G for wavenumber kappa, where
/// G phi = (i kappa avg(phi), (phi[j] - phi[j-1]) / h) at interior nodes and 0 on walls.
struct PressurePoissonRow {
    double sub = 0.0;
    double diag = 0.0;
    double super = 0.0;
};
PressurePoissonRow pressure_poisson_row(int c, int n2, double kappa, double h);

/// Solves div G phi = rhs for one x1 mode in place. kappa = 0 is the Neumann
/// problem; its solution is fixed to zero mean.
void solve_pressure_poisson(int n2, double kappa, double h, std::span<Complex> rhs_inout);

/// u -= scale * G phi (phi given as centre spectra, n2 x cols).
void apply_pressure_gradient(ChannelField& u, std::span<const Complex> phi, double scale);

/// Removes the discrete gradient part of u (pressure untouched). Returns the
/// L2 divergence before projection.
double channel_project(ChannelField& u);

/// Velocity, gradients and (optionally) second derivatives at every node,
/// with trapezoid weights in x2. x1 derivatives are spectral; x2 derivatives
/// second-order finite differences (one-sided at the walls).
PointwiseState channel_pointwise(const ChannelField& u, bool with_hessian = true);

/// x1 derivative of row-wise spectra (rows x cols), returned as node values.
std::vector<double> channel_dx1(const ChannelField& u, std::span<const Complex> rows_spectrum, int rows, int order = 1);

} // namespace shearflow
