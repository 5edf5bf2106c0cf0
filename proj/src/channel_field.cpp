#include "shearflow/channel_field.hpp"

#include "shearflow/errors.hpp"
#include "shearflow/fft.hpp"
#include "shearflow/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shearflow {

namespace {

std::vector<double> rows_to_physical(int n1, int rows, std::span<const Complex> spectrum) {
    std::vector<double> out(static_cast<std::size_t>(rows) * static_cast<std::size_t>(n1));
    fft::PlanRows::get(n1, rows).inverse(spectrum, out);
    return out;
}

std::vector<Complex> rows_to_spectral(int n1, int rows, std::span<const double> values) {
    std::vector<Complex> out(static_cast<std::size_t>(rows) * static_cast<std::size_t>(n1 / 2 + 1));
    fft::PlanRows::get(n1, rows).forward(values, out);
    const auto cols = static_cast<std::size_t>(n1 / 2 + 1);
    for (int j = 0; j < rows; ++j) {
        out[static_cast<std::size_t>(j) * cols + cols - 1] = Complex{};
    }
    return out;
}

/// Not-a-knot cubic spline through uniformly spaced values.
double spline_eval(std::span<const double> y, double h, double x_from_start) {
    const int n = static_cast<int>(y.size()) - 1;
    std::vector<double> r(y.size(), 0.0);
    for (int j = 1; j < n; ++j) {
        r[static_cast<std::size_t>(j)] = 6.0 * (y[static_cast<std::size_t>(j - 1)] - 2.0 * y[static_cast<std::size_t>(j)]
                                                + y[static_cast<std::size_t>(j + 1)]) / (h * h);
    }
    std::vector<double> m(y.size(), 0.0);
    m[1] = r[1] / 6.0;
    m[static_cast<std::size_t>(n - 1)] = r[static_cast<std::size_t>(n - 1)] / 6.0;
    if (n - 3 >= 1) {
        const int inner = n - 3; // unknowns m[2..n-2]
        std::vector<double> a(static_cast<std::size_t>(inner), 1.0), b(static_cast<std::size_t>(inner), 4.0),
            c(static_cast<std::size_t>(inner), 1.0), d(static_cast<std::size_t>(inner));
        for (int q = 0; q < inner; ++q) {
            d[static_cast<std::size_t>(q)] = r[static_cast<std::size_t>(q + 2)];
        }
        d.front() -= m[1];
        d.back() -= m[static_cast<std::size_t>(n - 1)];
        solve_tridiagonal(a, b, c, std::span<double>(d));
        for (int q = 0; q < inner; ++q) {
            m[static_cast<std::size_t>(q + 2)] = d[static_cast<std::size_t>(q)];
        }
    }
    m[0] = 2.0 * m[1] - m[2];
    m[static_cast<std::size_t>(n)] = 2.0 * m[static_cast<std::size_t>(n - 1)] - m[static_cast<std::size_t>(n - 2)];

    const int j = std::clamp(static_cast<int>(std::floor(x_from_start / h)), 0, n - 1);
    const double t = x_from_start / h - j;
    const auto uj = static_cast<std::size_t>(j);
    const double s = 1.0 - t;
    return s * y[uj] + t * y[uj + 1] + h * h / 6.0 * ((s * s * s - s) * m[uj] + (t * t * t - t) * m[uj + 1]);
}

} // namespace

ChannelField::ChannelField(int n1, int n2) : n1_(n1), n2_(n2) {
    if (n1 < 4 || n1 % 2 != 0) {
        throw InvalidInput("channel field: n1 must be even and >= 4");
    }
    if (n2 < 4) {
        throw InvalidInput("channel field: n2 must be >= 4");
    }
    const auto cols = static_cast<std::size_t>(n1 / 2 + 1);
    spec_[0].assign(static_cast<std::size_t>(n2 + 1) * cols, Complex{});
    spec_[1].assign(static_cast<std::size_t>(n2 + 1) * cols, Complex{});
    pressure_.assign(static_cast<std::size_t>(n2) * cols, Complex{});
}

ChannelField ChannelField::from_nodes(int n1, int n2, std::span<const double> u1, std::span<const double> u2) {
    ChannelField f(n1, n2);
    const auto size = static_cast<std::size_t>(n2 + 1) * static_cast<std::size_t>(n1);
    if (u1.size() != size || u2.size() != size) {
        throw InvalidInput("channel field: node arrays must have (n2+1) x n1 entries");
    }
    f.spec_[0] = rows_to_spectral(n1, n2 + 1, u1);
    f.spec_[1] = rows_to_spectral(n1, n2 + 1, u2);
    const auto cols = static_cast<std::size_t>(f.cols());
    for (auto& s : f.spec_) {
        std::fill_n(s.begin(), cols, Complex{});
        std::fill_n(s.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(n2) * cols), cols, Complex{});
    }
    return f;
}

double ChannelField::kappa(int k) const { return std::numbers::pi * k; }

std::vector<double> ChannelField::nodes(int component) const {
    return rows_to_physical(n1_, n2_ + 1, spectrum(component));
}

std::vector<double> ChannelField::pressure() const { return rows_to_physical(n1_, n2_, pressure_); }

std::array<double, 2> ChannelField::evaluate(double x1, double x2, bool* clamped) const {
    if (clamped) {
        *clamped = false;
    }
    if (!(std::abs(x2) <= 1.0)) {
        if (clamped) {
            *clamped = true;
        }
        return {0.0, 0.0};
    }
    const double xi = std::numbers::pi * (x1 + 1.0);
    const int c = cols();
    std::vector<Complex> phase(static_cast<std::size_t>(c));
    for (int k = 0; k < c; ++k) {
        phase[static_cast<std::size_t>(k)] = std::polar(k == 0 ? 1.0 : 2.0, xi * k);
    }
    std::array<double, 2> out{};
    std::vector<double> column(static_cast<std::size_t>(n2_ + 1));
    for (int comp = 0; comp < 2; ++comp) {
        const auto s = spectrum(comp);
        for (int j = 0; j <= n2_; ++j) {
            double v = 0.0;
            for (int k = 0; k < c - 1; ++k) {
                v += (s[static_cast<std::size_t>(j * c + k)] * phase[static_cast<std::size_t>(k)]).real();
            }
            column[static_cast<std::size_t>(j)] = v;
        }
        out[static_cast<std::size_t>(comp)] = spline_eval(column, h2(), x2 + 1.0);
    }
    return out;
}

double ChannelField::wall_defect() const {
    double m = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
        const auto v = nodes(comp);
        for (int i = 0; i < n1_; ++i) {
            m = std::max({m, std::abs(v[static_cast<std::size_t>(i)]),
                          std::abs(v[static_cast<std::size_t>(n2_ * n1_ + i)])});
        }
    }
    return m;
}

namespace {

double rows_l2(std::span<const Complex> rows, int nrows, int cols, double h2) {
    double sum = 0.0;
    for (int j = 0; j < nrows; ++j) {
        for (int k = 0; k < cols; ++k) {
            sum += (k == 0 ? 1.0 : 2.0) * std::norm(rows[static_cast<std::size_t>(j * cols + k)]);
        }
    }
    return std::sqrt(2.0 * h2 * sum);
}

} // namespace

std::vector<Complex> channel_divergence(const ChannelField& u) {
    const int cols = u.cols();
    const int n2 = u.n2();
    const double h = u.h2();
    std::vector<Complex> div(static_cast<std::size_t>(n2 * cols));
    const auto s1 = u.spectrum(0);
    const auto s2 = u.spectrum(1);
    for (int c = 0; c < n2; ++c) {
        for (int k = 0; k < cols; ++k) {
            const auto lo = static_cast<std::size_t>(c * cols + k);
            const auto hi = static_cast<std::size_t>((c + 1) * cols + k);
            div[lo] = Complex(0.0, u.kappa(k)) * 0.5 * (s1[lo] + s1[hi]) + (s2[hi] - s2[lo]) / h;
        }
    }
    return div;
}

double ChannelField::divergence_l2() const { return rows_l2(channel_divergence(*this), n2_, cols(), h2()); }

void ChannelField::truncate(int cutoff) {
    const int c = cols();
    for (auto& s : spec_) {
        for (int j = 0; j <= n2_; ++j) {
            for (int k = cutoff + 1; k < c; ++k) {
                s[static_cast<std::size_t>(j * c + k)] = Complex{};
            }
        }
    }
    for (int j = 0; j < n2_; ++j) {
        for (int k = cutoff + 1; k < c; ++k) {
            pressure_[static_cast<std::size_t>(j * c + k)] = Complex{};
        }
    }
}

ChannelField operator+(const ChannelField& a, const ChannelField& b) {
    ChannelField out(a);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < out.spec_[c].size(); ++i) out.spec_[c][i] += b.spec_[c][i];
    }
    for (std::size_t i = 0; i < out.pressure_.size(); ++i) out.pressure_[i] += b.pressure_[i];
    return out;
}

ChannelField operator-(const ChannelField& a, const ChannelField& b) { return a + (-1.0) * b; }

ChannelField operator*(double s, const ChannelField& a) {
    ChannelField out(a);
    for (auto& v : out.spec_) {
        for (auto& z : v) z *= s;
    }
    for (auto& z : out.pressure_) z *= s;
    return out;
}

PressurePoissonRow pressure_poisson_row(int c, int n2, double kappa, double h) {
    const double kk = 0.25 * kappa * kappa;
    const double ih2 = 1.0 / (h * h);
    PressurePoissonRow row;
    const bool lower_interior = c >= 1;          // node c
    const bool upper_interior = c + 1 <= n2 - 1; // node c + 1
    if (lower_interior) {
        row.diag += -kk - ih2;
        row.sub = -kk + ih2;
    }
    if (upper_interior) {
        row.diag += -kk - ih2;
        row.super = -kk + ih2;
    }
    return row;
}

void solve_pressure_poisson(int n2, double kappa, double h, std::span<Complex> rhs_inout) {
    std::vector<double> a(static_cast<std::size_t>(n2)), b(static_cast<std::size_t>(n2)), c(static_cast<std::size_t>(n2));
    for (int r = 0; r < n2; ++r) {
        const auto row = pressure_poisson_row(r, n2, kappa, h);
        a[static_cast<std::size_t>(r)] = row.sub;
        b[static_cast<std::size_t>(r)] = row.diag;
        c[static_cast<std::size_t>(r)] = row.super;
    }
    const bool singular = kappa == 0.0;
    if (singular) {
        // Neumann problem: pin the first value, then fix the mean to zero.
        b[0] = 1.0;
        c[0] = 0.0;
        rhs_inout[0] = 0.0;
    }
    solve_tridiagonal(a, b, c, rhs_inout);
    if (singular) {
        Complex mean{};
        for (const auto& v : rhs_inout) mean += v;
        mean /= static_cast<double>(n2);
        for (auto& v : rhs_inout) v -= mean;
    }
}

void apply_pressure_gradient(ChannelField& u, std::span<const Complex> phi, double scale) {
    const int cols = u.cols();
    const int n2 = u.n2();
    const double h = u.h2();
    auto s1 = u.spectrum_mut(0);
    auto s2 = u.spectrum_mut(1);
    for (int j = 1; j < n2; ++j) {
        for (int k = 0; k < cols; ++k) {
            const Complex below = phi[static_cast<std::size_t>((j - 1) * cols + k)];
            const Complex above = phi[static_cast<std::size_t>(j * cols + k)];
            const auto idx = static_cast<std::size_t>(j * cols + k);
            s1[idx] -= scale * Complex(0.0, u.kappa(k)) * 0.5 * (below + above);
            s2[idx] -= scale * (above - below) / h;
        }
    }
}

double channel_project(ChannelField& u) {
    const int cols = u.cols();
    const int n2 = u.n2();
    auto div = channel_divergence(u);
    const double before = rows_l2(div, n2, cols, u.h2());
    std::vector<Complex> column(static_cast<std::size_t>(n2));
    for (int k = 0; k < cols - 1; ++k) {
        for (int c = 0; c < n2; ++c) column[static_cast<std::size_t>(c)] = div[static_cast<std::size_t>(c * cols + k)];
        solve_pressure_poisson(n2, u.kappa(k), u.h2(), column);
        for (int c = 0; c < n2; ++c) div[static_cast<std::size_t>(c * cols + k)] = column[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < n2; ++c) div[static_cast<std::size_t>(c * cols + cols - 1)] = Complex{};
    apply_pressure_gradient(u, div, 1.0);
    return before;
}

// ---------------------------------------------------------------------------

namespace {

/// Finite differences along x2 of row-wise spectra (rows = n2 + 1 nodes).
std::vector<Complex> dx2(std::span<const Complex> s, int n2, int cols, double h) {
    std::vector<Complex> out(s.size());
    auto at = [&](int j, int k) { return s[static_cast<std::size_t>(j * cols + k)]; };
    for (int k = 0; k < cols; ++k) {
        out[static_cast<std::size_t>(k)] = (-3.0 * at(0, k) + 4.0 * at(1, k) - at(2, k)) / (2.0 * h);
        for (int j = 1; j < n2; ++j) {
            out[static_cast<std::size_t>(j * cols + k)] = (at(j + 1, k) - at(j - 1, k)) / (2.0 * h);
        }
        out[static_cast<std::size_t>(n2 * cols + k)] = (3.0 * at(n2, k) - 4.0 * at(n2 - 1, k) + at(n2 - 2, k)) / (2.0 * h);
    }
    return out;
}

std::vector<Complex> dx2x2(std::span<const Complex> s, int n2, int cols, double h) {
    std::vector<Complex> out(s.size());
    auto at = [&](int j, int k) { return s[static_cast<std::size_t>(j * cols + k)]; };
    const double ih2 = 1.0 / (h * h);
    for (int k = 0; k < cols; ++k) {
        out[static_cast<std::size_t>(k)] = (2.0 * at(0, k) - 5.0 * at(1, k) + 4.0 * at(2, k) - at(3, k)) * ih2;
        for (int j = 1; j < n2; ++j) {
            out[static_cast<std::size_t>(j * cols + k)] = (at(j + 1, k) - 2.0 * at(j, k) + at(j - 1, k)) * ih2;
        }
        out[static_cast<std::size_t>(n2 * cols + k)] =
            (2.0 * at(n2, k) - 5.0 * at(n2 - 1, k) + 4.0 * at(n2 - 2, k) - at(n2 - 3, k)) * ih2;
    }
    return out;
}

std::vector<Complex> dx1_spectral(const ChannelField& u, std::span<const Complex> s, int rows, int order) {
    const int cols = u.cols();
    std::vector<Complex> out(s.begin(), s.end());
    for (int j = 0; j < rows; ++j) {
        for (int k = 0; k < cols; ++k) {
            Complex factor = 1.0;
            for (int o = 0; o < order; ++o) factor *= Complex(0.0, u.kappa(k));
            out[static_cast<std::size_t>(j * cols + k)] *= factor;
        }
    }
    return out;
}

} // namespace

std::vector<double> channel_dx1(const ChannelField& u, std::span<const Complex> rows_spectrum, int rows, int order) {
    return rows_to_physical(u.n1(), rows, dx1_spectral(u, rows_spectrum, rows, order));
}

PointwiseState channel_pointwise(const ChannelField& u, bool with_hessian) {
    const int n1 = u.n1();
    const int n2 = u.n2();
    const int rows = n2 + 1;
    const int cols = u.cols();
    const double h = u.h2();
    PointwiseState s;
    s.weight.assign(static_cast<std::size_t>(rows * n1), u.h1() * h);
    for (int i = 0; i < n1; ++i) {
        s.weight[static_cast<std::size_t>(i)] *= 0.5;
        s.weight[static_cast<std::size_t>(n2 * n1 + i)] *= 0.5;
    }
    auto phys = [&](const std::vector<Complex>& spec) { return rows_to_physical(n1, rows, spec); };
    for (int c = 0; c < 2; ++c) {
        const auto sc = u.spectrum(c);
        const std::vector<Complex> base(sc.begin(), sc.end());
        const auto d2 = dx2(base, n2, cols, h);
        s.u[static_cast<std::size_t>(c)] = phys(base);
        s.grad[static_cast<std::size_t>(2 * c + 0)] = phys(dx1_spectral(u, base, rows, 1));
        s.grad[static_cast<std::size_t>(2 * c + 1)] = phys(d2);
        if (with_hessian) {
            const auto d11 = phys(dx1_spectral(u, base, rows, 2));
            const auto d12 = phys(dx1_spectral(u, d2, rows, 1));
            const auto d22 = phys(dx2x2(base, n2, cols, h));
            s.hess[static_cast<std::size_t>(4 * c + 0)] = d11;
            s.hess[static_cast<std::size_t>(4 * c + 1)] = d12;
            s.hess[static_cast<std::size_t>(4 * c + 2)] = d12;
            s.hess[static_cast<std::size_t>(4 * c + 3)] = d22;
        }
    }
    return s;
}

} // namespace shearflow
