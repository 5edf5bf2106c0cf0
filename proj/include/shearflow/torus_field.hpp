#pragma once

/// @file torus_field.hpp
/// @brief Mean-zero velocity fields on the 2*pi-periodic torus and their spectral calculus.
///
/// Grid layout: n x n samples, row-major with the row index along x2 and the
/// column index along x1, x = (2*pi*i/n, 2*pi*j/n). The spectral coefficients
/// are the FFTW half spectrum: n rows (k2) x (n/2 + 1) columns (k1 >= 0).
/// The spectrum is authoritative; physical samples are derived lazily.

#include "shearflow/constitutive.hpp"
#include "shearflow/fft.hpp"
#include "shearflow/pointwise.hpp"

#include <array>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace shearflow {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Signed wavenumber of FFT index `index` for an n-point transform.
constexpr int wavenumber(int index, int n) { return index <= n / 2 ? index : index - n; }

/// Scalar field sampled on the n x n torus grid.
struct ScalarGrid {
    int n = 0;
    std::vector<double> values;
};

/// Pointwise symmetric tensor on the torus grid.
struct TensorFieldGrid {
    int n = 0;
    std::vector<double> d11;
    std::vector<double> d12;
    std::vector<double> d22;

    [[nodiscard]] SymTensor2 at(std::size_t idx) const { return {d11[idx], d12[idx], d22[idx]}; }
};

class TorusField {
public:
    TorusField() : TorusField(4) {}
    explicit TorusField(int n);

    TorusField(const TorusField& other);
    TorusField& operator=(const TorusField& other);
    TorusField(TorusField&&) noexcept;
    TorusField& operator=(TorusField&&) noexcept;
    ~TorusField();

    /// Build from physical samples. The mean and the Nyquist modes are removed;
    /// the result is not projected.
    static TorusField from_grid(int n, std::span<const double> u1, std::span<const double> u2);

    [[nodiscard]] int resolution() const { return n_; }
    [[nodiscard]] int spectral_cols() const { return n_ / 2 + 1; }
    [[nodiscard]] std::size_t spectral_size() const { return spec_[0].size(); }

    [[nodiscard]] std::span<const Complex> spectrum(int component) const;
    /// Mutable access; invalidates the cached grid. Callers must keep the
    /// half-spectrum consistent (conjugate pairs on the k1 = 0 column).
    std::span<Complex> spectrum_mut(int component);

    /// Physical samples of one component (consumes the spectrum).
    [[nodiscard]] const std::vector<double>& grid(int component) const;

    /// Coefficient for any wavevector with |k1|,|k2| < n/2 (0 outside).
    [[nodiscard]] Complex coefficient(int component, int k1, int k2) const;
    /// Sets coefficient k and its conjugate partner -k.
    void set_coefficient(int component, int k1, int k2, Complex value);

    /// Max over modes of |k . u(k)| / |k||u(k)| style defect: returns
    /// sqrt(sum |k.u(k)|^2 / |k|^2) / (||u||_spec + tiny).
    [[nodiscard]] double divergence_defect() const;
    /// Largest max(|k1|,|k2|) over nonzero coefficients (0 for the zero field).
    [[nodiscard]] int max_active_mode() const;

    /// Zero every coefficient with max(|k1|,|k2|) > cutoff, the mean mode and the Nyquist modes.
    void truncate(int cutoff);

    /// Value of the exact Fourier series at an arbitrary point.
    [[nodiscard]] std::array<double, 2> evaluate(double x1, double x2) const;

    friend TorusField operator+(const TorusField& a, const TorusField& b);
    friend TorusField operator-(const TorusField& a, const TorusField& b);
    friend TorusField operator*(double s, const TorusField& a);

private:
    void invalidate();

    int n_;
    std::array<std::vector<Complex>, 2> spec_;
    struct GridCache;
    std::unique_ptr<GridCache> cache_;
};

/// Applies the multiplier (I - k k^T/|k|^2) mode by mode.
TorusField leray_project(const TorusField& w);

/// Gradient grids: g[0] = d1 u1, g[1] = d2 u1, g[2] = d1 u2, g[3] = d2 u2.
std::array<std::vector<double>, 4> gradient_grids(const TorusField& u);

/// Symmetric gradient Du sampled on the grid.
TensorFieldGrid sym_grad(const TorusField& u);

/// Derivative of Du along direction `axis` (0 -> x1, 1 -> x2) on the grid.
TensorFieldGrid sym_grad_derivative(const TorusField& u, int axis);

/// All second derivatives: index [component][a][b] -> d_a d_b u_component.
std::array<std::array<std::array<std::vector<double>, 2>, 2>, 2> hessian_grids(const TorusField& u);

/// Divergence of a grid field computed spectrally (for diagnostics).
ScalarGrid divergence(const TorusField& u);

enum class NormMethod { automatic, parseval, quadrature };

/// Sobolev norm with integrand (sum_j binom(k, j) |grad^j u|^2)^(q/2), so that at
/// q = 2 it equals the Parseval form (2pi)^2 sum_k (1+|k|^2)^order |u(k)|^2.
/// order in {0,1,2}, q in [1, inf).
double sobolev_norm(const TorusField& u, int order, double q, NormMethod method = NormMethod::automatic);

/// Seminorm ||grad^order u||_q (all ordered derivative indices counted).
double sobolev_seminorm(const TorusField& u, int order, double q, NormMethod method = NormMethod::automatic);

/// Trapezoidal quadrature of a grid function over [0, 2pi]^2.
double integrate(int n, std::span<const double> values);

/// Spectral coefficients (half spectrum) of the dealiased stress divergence
/// div S(Du). Products are formed on the grid and truncated at `cutoff`.
std::array<std::vector<Complex>, 2> stress_divergence(const TorusField& u, const StressParams& params, int cutoff);

/// Spectral coefficients of (u . grad) u, truncated at `cutoff`.
std::array<std::vector<Complex>, 2> convection(const TorusField& u, int cutoff);

/// Solves -Lap(pi) = -div(nu1 div S(Du) + nu0 Lap u - (u.grad)u + f) for the
/// mean-zero pressure. `f` need not be solenoidal.
ScalarGrid pressure_recover(const TorusField& u, const TorusField& f, const StressParams& params);

/// Samples of u and its spectral derivatives with trapezoidal weights.
PointwiseState torus_pointwise(const TorusField& u, bool with_hessian = true);

/// Default Galerkin / dealiasing cutoff floor(n/3).
constexpr int galerkin_cutoff(int n) { return n / 3; }

} // namespace shearflow
