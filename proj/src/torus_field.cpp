#include "shearflow/torus_field.hpp"

#include "shearflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace shearflow {

struct TorusField::GridCache {
    std::mutex mutex;
    bool valid = false;
    std::array<std::vector<double>, 2> grid;
};

namespace {

std::size_t grid_size(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }

std::size_t spec_size(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1); }

/// Weight of a half-spectrum column in sums over the full spectrum.
double column_weight(int i1, int n) { return (i1 == 0 || i1 == n / 2) ? 1.0 : 2.0; }

void check_component(int c) {
    if (c != 0 && c != 1) {
        throw InvalidInput("torus field: component index must be 0 or 1");
    }
}

std::vector<double> to_grid(int n, std::span<const Complex> spec) {
    std::vector<double> out(grid_size(n));
    fft::Plan2D::get(n).inverse(spec, out);
    return out;
}

std::vector<Complex> to_spec(int n, std::span<const double> grid) {
    std::vector<Complex> out(spec_size(n));
    fft::Plan2D::get(n).forward(grid, out);
    return out;
}

/// Zero the mean, Nyquist row/column and every mode above the cutoff.
void truncate_spectrum(int n, std::span<Complex> spec, int cutoff) {
    const int cols = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        const int k2 = wavenumber(j, n);
        for (int i = 0; i < cols; ++i) {
            const bool nyquist = (j == n / 2) || (i == n / 2);
            const bool mean = (i == 0 && k2 == 0);
            if (nyquist || mean || std::max(i, std::abs(k2)) > cutoff) {
                spec[static_cast<std::size_t>(j * cols + i)] = 0.0;
            }
        }
    }
}

/// Multiply the spectrum by i*k_axis and transform to the grid.
std::vector<double> derivative_grid(int n, std::span<const Complex> spec, int axis) {
    std::vector<Complex> tmp(spec.begin(), spec.end());
    const int cols = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        const int k2 = wavenumber(j, n);
        for (int i = 0; i < cols; ++i) {
            const double k = axis == 0 ? i : k2;
            tmp[static_cast<std::size_t>(j * cols + i)] *= Complex(0.0, k);
        }
    }
    truncate_spectrum(n, tmp, n);
    return to_grid(n, tmp);
}

std::vector<double> second_derivative_grid(int n, std::span<const Complex> spec, int a, int b) {
    std::vector<Complex> tmp(spec.begin(), spec.end());
    const int cols = n / 2 + 1;
    for (int j = 0; j < n; ++j) {
        const int k2 = wavenumber(j, n);
        for (int i = 0; i < cols; ++i) {
            const double ka = a == 0 ? i : k2;
            const double kb = b == 0 ? i : k2;
            tmp[static_cast<std::size_t>(j * cols + i)] *= -ka * kb;
        }
    }
    truncate_spectrum(n, tmp, n);
    return to_grid(n, tmp);
}

} // namespace

TorusField::TorusField(int n) : n_(n), cache_(std::make_unique<GridCache>()) {
    if (n < 4 || n % 2 != 0) {
        throw InvalidInput("torus field: resolution must be even and >= 4");
    }
    spec_[0].assign(spec_size(n), Complex{});
    spec_[1].assign(spec_size(n), Complex{});
}

TorusField::TorusField(const TorusField& other) : n_(other.n_), spec_(other.spec_), cache_(std::make_unique<GridCache>()) {}

TorusField& TorusField::operator=(const TorusField& other) {
    if (this != &other) {
        n_ = other.n_;
        spec_ = other.spec_;
        invalidate();
    }
    return *this;
}

TorusField::TorusField(TorusField&& other) noexcept
    : n_(other.n_), spec_(std::move(other.spec_)), cache_(std::move(other.cache_)) {}

TorusField& TorusField::operator=(TorusField&& other) noexcept {
    n_ = other.n_;
    spec_ = std::move(other.spec_);
    cache_ = std::move(other.cache_);
    return *this;
}

TorusField::~TorusField() = default;

void TorusField::invalidate() {
    if (!cache_) {
        cache_ = std::make_unique<GridCache>();
    }
    std::lock_guard lock(cache_->mutex);
    cache_->valid = false;
}

TorusField TorusField::from_grid(int n, std::span<const double> u1, std::span<const double> u2) {
    if (u1.size() != grid_size(n) || u2.size() != grid_size(n)) {
        throw InvalidInput("torus field: grid size does not match resolution");
    }
    TorusField f(n);
    f.spec_[0] = to_spec(n, u1);
    f.spec_[1] = to_spec(n, u2);
    truncate_spectrum(n, f.spec_[0], n);
    truncate_spectrum(n, f.spec_[1], n);
    return f;
}

std::span<const Complex> TorusField::spectrum(int component) const {
    check_component(component);
    return spec_[static_cast<std::size_t>(component)];
}

std::span<Complex> TorusField::spectrum_mut(int component) {
    check_component(component);
    invalidate();
    return spec_[static_cast<std::size_t>(component)];
}

const std::vector<double>& TorusField::grid(int component) const {
    check_component(component);
    std::lock_guard lock(cache_->mutex);
    if (!cache_->valid) {
        cache_->grid[0] = to_grid(n_, spec_[0]);
        cache_->grid[1] = to_grid(n_, spec_[1]);
        cache_->valid = true;
    }
    return cache_->grid[static_cast<std::size_t>(component)];
}

Complex TorusField::coefficient(int component, int k1, int k2) const {
    check_component(component);
    if (std::abs(k1) >= n_ / 2 || std::abs(k2) >= n_ / 2) {
        return 0.0;
    }
    const auto& s = spec_[static_cast<std::size_t>(component)];
    const int cols = spectral_cols();
    if (k1 >= 0) {
        const int j = (k2 + n_) % n_;
        return s[static_cast<std::size_t>(j * cols + k1)];
    }
    const int j = (-k2 + n_) % n_;
    return std::conj(s[static_cast<std::size_t>(j * cols - k1)]);
}

void TorusField::set_coefficient(int component, int k1, int k2, Complex value) {
    check_component(component);
    if (std::abs(k1) >= n_ / 2 || std::abs(k2) >= n_ / 2) {
        throw InvalidInput("torus field: wavevector outside the resolved band");
    }
    if (k1 == 0 && k2 == 0) {
        throw InvalidInput("torus field: the mean mode is fixed at zero");
    }
    invalidate();
    auto& s = spec_[static_cast<std::size_t>(component)];
    const int cols = spectral_cols();
    if (k1 < 0) {
        k1 = -k1;
        k2 = -k2;
        value = std::conj(value);
    }
    s[static_cast<std::size_t>(((k2 + n_) % n_) * cols + k1)] = value;
    if (k1 == 0) {
        s[static_cast<std::size_t>(((-k2 + n_) % n_) * cols)] = std::conj(value);
    }
}

double TorusField::divergence_defect() const {
    const int cols = spectral_cols();
    double div2 = 0.0;
    double norm2 = 0.0;
    for (int j = 0; j < n_; ++j) {
        const int k2 = wavenumber(j, n_);
        for (int i = 0; i < cols; ++i) {
            const auto idx = static_cast<std::size_t>(j * cols + i);
            const double k2norm = double(i) * i + double(k2) * k2;
            const double w = column_weight(i, n_);
            norm2 += w * (std::norm(spec_[0][idx]) + std::norm(spec_[1][idx]));
            if (k2norm > 0.0) {
                div2 += w * std::norm(double(i) * spec_[0][idx] + double(k2) * spec_[1][idx]) / k2norm;
            }
        }
    }
    return norm2 > 0.0 ? std::sqrt(div2 / norm2) : 0.0;
}

int TorusField::max_active_mode() const {
    const int cols = spectral_cols();
    int m = 0;
    for (int j = 0; j < n_; ++j) {
        const int k2 = wavenumber(j, n_);
        for (int i = 0; i < cols; ++i) {
            const auto idx = static_cast<std::size_t>(j * cols + i);
            if (spec_[0][idx] != Complex{} || spec_[1][idx] != Complex{}) {
                m = std::max(m, std::max(i, std::abs(k2)));
            }
        }
    }
    return m;
}

void TorusField::truncate(int cutoff) {
    invalidate();
    truncate_spectrum(n_, spec_[0], cutoff);
    truncate_spectrum(n_, spec_[1], cutoff);
}

std::array<double, 2> TorusField::evaluate(double x1, double x2) const {
    const int cols = spectral_cols();
    std::vector<Complex> e1(static_cast<std::size_t>(cols));
    std::vector<Complex> e2(static_cast<std::size_t>(n_));
    for (int i = 0; i < cols; ++i) {
        e1[static_cast<std::size_t>(i)] = std::polar(1.0, i * x1);
    }
    for (int j = 0; j < n_; ++j) {
        e2[static_cast<std::size_t>(j)] = std::polar(1.0, wavenumber(j, n_) * x2);
    }
    std::array<double, 2> out{0.0, 0.0};
    for (int j = 0; j < n_; ++j) {
        Complex row0{}, row1{};
        const Complex* s0 = spec_[0].data() + static_cast<std::size_t>(j * cols);
        const Complex* s1 = spec_[1].data() + static_cast<std::size_t>(j * cols);
        for (int i = 0; i < cols; ++i) {
            const double w = column_weight(i, n_);
            const Complex e = w * e1[static_cast<std::size_t>(i)];
            row0 += s0[i] * e;
            row1 += s1[i] * e;
        }
        out[0] += (row0 * e2[static_cast<std::size_t>(j)]).real();
        out[1] += (row1 * e2[static_cast<std::size_t>(j)]).real();
    }
    return out;
}

TorusField operator+(const TorusField& a, const TorusField& b) {
    if (a.n_ != b.n_) {
        throw InvalidInput("torus field: resolution mismatch");
    }
    TorusField out(a);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < out.spec_[c].size(); ++i) {
            out.spec_[c][i] += b.spec_[c][i];
        }
    }
    return out;
}

TorusField operator-(const TorusField& a, const TorusField& b) { return a + (-1.0) * b; }

TorusField operator*(double s, const TorusField& a) {
    TorusField out(a);
    for (auto& comp : out.spec_) {
        for (auto& v : comp) {
            v *= s;
        }
    }
    return out;
}

TorusField leray_project(const TorusField& w) {
    const int n = w.resolution();
    const int cols = w.spectral_cols();
    TorusField out(w);
    auto s0 = out.spectrum_mut(0);
    auto s1 = out.spectrum_mut(1);
    for (int j = 0; j < n; ++j) {
        const double k2 = wavenumber(j, n);
        for (int i = 0; i < cols; ++i) {
            const auto idx = static_cast<std::size_t>(j * cols + i);
            const double k1 = i;
            const double kk = k1 * k1 + k2 * k2;
            if (kk == 0.0) {
                s0[idx] = 0.0;
                s1[idx] = 0.0;
                continue;
            }
            const Complex kdotu = (k1 * s0[idx] + k2 * s1[idx]) / kk;
            s0[idx] -= k1 * kdotu;
            s1[idx] -= k2 * kdotu;
        }
    }
    return out;
}

std::array<std::vector<double>, 4> gradient_grids(const TorusField& u) {
    const int n = u.resolution();
    return {derivative_grid(n, u.spectrum(0), 0), derivative_grid(n, u.spectrum(0), 1),
            derivative_grid(n, u.spectrum(1), 0), derivative_grid(n, u.spectrum(1), 1)};
}

TensorFieldGrid sym_grad(const TorusField& u) {
    const auto g = gradient_grids(u);
    TensorFieldGrid out;
    out.n = u.resolution();
    out.d11 = g[0];
    out.d22 = g[3];
    out.d12.resize(g[1].size());
    for (std::size_t i = 0; i < g[1].size(); ++i) {
        out.d12[i] = 0.5 * (g[1][i] + g[2][i]);
    }
    return out;
}

TensorFieldGrid sym_grad_derivative(const TorusField& u, int axis) {
    const int n = u.resolution();
    const auto h = hessian_grids(u);
    const auto a = static_cast<std::size_t>(axis);
    TensorFieldGrid out;
    out.n = n;
    out.d11 = h[0][a][0];
    out.d22 = h[1][a][1];
    out.d12.resize(out.d11.size());
    for (std::size_t i = 0; i < out.d12.size(); ++i) {
        out.d12[i] = 0.5 * (h[0][a][1][i] + h[1][a][0][i]);
    }
    return out;
}

std::array<std::array<std::array<std::vector<double>, 2>, 2>, 2> hessian_grids(const TorusField& u) {
    const int n = u.resolution();
    std::array<std::array<std::array<std::vector<double>, 2>, 2>, 2> h;
    for (int c = 0; c < 2; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        h[cc][0][0] = second_derivative_grid(n, u.spectrum(c), 0, 0);
        h[cc][0][1] = second_derivative_grid(n, u.spectrum(c), 0, 1);
        h[cc][1][0] = h[cc][0][1];
        h[cc][1][1] = second_derivative_grid(n, u.spectrum(c), 1, 1);
    }
    return h;
}

ScalarGrid divergence(const TorusField& u) {
    const int n = u.resolution();
    auto a = derivative_grid(n, u.spectrum(0), 0);
    const auto b = derivative_grid(n, u.spectrum(1), 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += b[i];
    }
    return {n, std::move(a)};
}

double integrate(int n, std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double cell = (kTwoPi / n) * (kTwoPi / n);
    return sum * cell;
}

namespace {

double parseval_sum(const TorusField& u, int order, bool seminorm) {
    const int n = u.resolution();
    const int cols = u.spectral_cols();
    const auto s0 = u.spectrum(0);
    const auto s1 = u.spectrum(1);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double k2 = wavenumber(j, n);
        for (int i = 0; i < cols; ++i) {
            const auto idx = static_cast<std::size_t>(j * cols + i);
            const double kk = double(i) * i + k2 * k2;
            const double factor = seminorm ? std::pow(kk, order) : std::pow(1.0 + kk, order);
            sum += column_weight(i, n) * factor * (std::norm(s0[idx]) + std::norm(s1[idx]));
        }
    }
    return kTwoPi * kTwoPi * sum;
}

/// Pointwise |grad^j u|^2 for j = 0..order.
std::vector<std::vector<double>> derivative_magnitudes(const TorusField& u, int order) {
    const std::size_t size = grid_size(u.resolution());
    std::vector<std::vector<double>> mags;
    std::vector<double> m0(size, 0.0);
    for (int c = 0; c < 2; ++c) {
        const auto& g = u.grid(c);
        for (std::size_t i = 0; i < size; ++i) {
            m0[i] += g[i] * g[i];
        }
    }
    mags.push_back(std::move(m0));
    if (order >= 1) {
        const auto g = gradient_grids(u);
        std::vector<double> m1(size, 0.0);
        for (const auto& comp : g) {
            for (std::size_t i = 0; i < size; ++i) {
                m1[i] += comp[i] * comp[i];
            }
        }
        mags.push_back(std::move(m1));
    }
    if (order >= 2) {
        const auto h = hessian_grids(u);
        std::vector<double> m2(size, 0.0);
        for (const auto& comp : h) {
            for (const auto& row : comp) {
                for (const auto& entry : row) {
                    for (std::size_t i = 0; i < size; ++i) {
                        m2[i] += entry[i] * entry[i];
                    }
                }
            }
        }
        mags.push_back(std::move(m2));
    }
    return mags;
}

void check_norm_args(int order, double q) {
    if (order < 0 || order > 2) {
        throw InvalidInput("sobolev norm: order must be 0, 1 or 2");
    }
    if (!(q >= 1.0) || !std::isfinite(q)) {
        throw InvalidInput("sobolev norm: exponent must lie in [1, inf)");
    }
}

} // namespace

double sobolev_norm(const TorusField& u, int order, double q, NormMethod method) {
    check_norm_args(order, q);
    if (method == NormMethod::parseval && q != 2.0) {
        throw InvalidInput("sobolev norm: Parseval evaluation needs q = 2");
    }
    if (method != NormMethod::quadrature && q == 2.0) {
        return std::sqrt(parseval_sum(u, order, false));
    }
    const auto mags = derivative_magnitudes(u, order);
    static constexpr double binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
    std::vector<double> integrand(mags[0].size(), 0.0);
    for (std::size_t i = 0; i < integrand.size(); ++i) {
        double s = 0.0;
        for (int j = 0; j <= order; ++j) {
            s += binom[order][j] * mags[static_cast<std::size_t>(j)][i];
        }
        integrand[i] = std::pow(s, 0.5 * q);
    }
    return std::pow(integrate(u.resolution(), integrand), 1.0 / q);
}

double sobolev_seminorm(const TorusField& u, int order, double q, NormMethod method) {
    check_norm_args(order, q);
    if (method == NormMethod::parseval && q != 2.0) {
        throw InvalidInput("sobolev seminorm: Parseval evaluation needs q = 2");
    }
    if (method != NormMethod::quadrature && q == 2.0) {
        return std::sqrt(parseval_sum(u, order, true));
    }
    const auto mags = derivative_magnitudes(u, order);
    const auto& top = mags[static_cast<std::size_t>(order)];
    std::vector<double> integrand(top.size());
    for (std::size_t i = 0; i < top.size(); ++i) {
        integrand[i] = std::pow(top[i], 0.5 * q);
    }
    return std::pow(integrate(u.resolution(), integrand), 1.0 / q);
}

std::array<std::vector<Complex>, 2> stress_divergence(const TorusField& u, const StressParams& params, int cutoff) {
    const int n = u.resolution();
    const int cols = n / 2 + 1;
    const TensorFieldGrid d = sym_grad(u);
    const std::size_t size = d.d11.size();
    std::vector<double> s11(size), s12(size), s22(size);
    for (std::size_t i = 0; i < size; ++i) {
        const SymTensor2 s = stress(d.at(i), params);
        s11[i] = s.d11;
        s12[i] = s.d12;
        s22[i] = s.d22;
    }
    auto h11 = to_spec(n, s11);
    auto h12 = to_spec(n, s12);
    auto h22 = to_spec(n, s22);
    std::array<std::vector<Complex>, 2> out{std::vector<Complex>(spec_size(n)), std::vector<Complex>(spec_size(n))};
    for (int j = 0; j < n; ++j) {
        const double k2 = wavenumber(j, n);
        for (int i = 0; i < cols; ++i) {
            const auto idx = static_cast<std::size_t>(j * cols + i);
            const Complex ik1(0.0, double(i));
            const Complex ik2(0.0, k2);
            out[0][idx] = ik1 * h11[idx] + ik2 * h12[idx];
            out[1][idx] = ik1 * h12[idx] + ik2 * h22[idx];
        }
    }
    truncate_spectrum(n, out[0], cutoff);
    truncate_spectrum(n, out[1], cutoff);
    return out;
}

std::array<std::vector<Complex>, 2> convection(const TorusField& u, int cutoff) {
    const int n = u.resolution();
    const auto g = gradient_grids(u);
    const auto& u1 = u.grid(0);
    const auto& u2 = u.grid(1);
    const std::size_t size = u1.size();
    std::vector<double> c1(size), c2(size);
    for (std::size_t i = 0; i < size; ++i) {
        c1[i] = u1[i] * g[0][i] + u2[i] * g[1][i];
        c2[i] = u1[i] * g[2][i] + u2[i] * g[3][i];
    }
    std::array<std::vector<Complex>, 2> out{to_spec(n, c1), to_spec(n, c2)};
    truncate_spectrum(n, out[0], cutoff);
    truncate_spectrum(n, out[1], cutoff);
    return out;
}

ScalarGrid pressure_recover(const TorusField& u, const TorusField& f, const StressParams& params) {
    params.validate(true);
    const int n = u.resolution();
    if (f.resolution() != n) {
        throw InvalidInput("pressure_recover: forcing resolution mismatch");
    }
    const int cols = n / 2 + 1;
    const int cutoff = galerkin_cutoff(n);
    const auto sdiv = stress_divergence(u, params, cutoff);
    const auto conv = convection(u, cutoff);
    std::vector<Complex> pi(spec_size(n));
    for (int j = 0; j < n; ++j) {
        const double k2 = wavenumber(j, n);
        for (int i = 0; i < cols; ++i) {
            const auto idx = static_cast<std::size_t>(j * cols + i);
            const double k1 = i;
            const double kk = k1 * k1 + k2 * k2;
            if (kk == 0.0) {
                continue;
            }
            std::array<Complex, 2> rhs{};
            for (std::size_t c = 0; c < 2; ++c) {
                const Complex uc = u.spectrum(static_cast<int>(c))[idx];
                rhs[c] = params.nu1 * sdiv[c][idx] - params.nu0 * kk * uc - conv[c][idx]
                    + f.spectrum(static_cast<int>(c))[idx];
            }
            pi[idx] = Complex(0.0, -1.0) * (k1 * rhs[0] + k2 * rhs[1]) / kk;
        }
    }
    truncate_spectrum(n, pi, n);
    return {n, to_grid(n, pi)};
}

PointwiseState torus_pointwise(const TorusField& u, bool with_hessian) {
    const int n = u.resolution();
    PointwiseState s;
    const double cell = (kTwoPi / n) * (kTwoPi / n);
    s.weight.assign(grid_size(n), cell);
    s.u = {u.grid(0), u.grid(1)};
    s.grad = gradient_grids(u);
    if (with_hessian) {
        auto h = hessian_grids(u);
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t b = 0; b < 2; ++b) {
                    s.hess[4 * c + 2 * a + b] = h[c][a][b];
                }
            }
        }
    }
    return s;
}

} // namespace shearflow
