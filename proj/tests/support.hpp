#pragma once

// Shared helpers for the test binaries.

#include "shearflow/channel_field.hpp"
#include "shearflow/torus_field.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testing {

using shearflow::ChannelField;
using shearflow::TorusField;

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Adaptive Simpson quadrature of f on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int depth) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid);
            const double rm = 0.5 * (mid + hi);
            const double flm = f(lm);
            const double frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
                return left + right + (left + right - whole) / 15.0;
            }
            return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, depth - 1) +
                   rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth - 1);
        };
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

/// Samples a vector function on the n x n torus grid.
inline TorusField torus_from(int n, const std::function<std::array<double, 2>(double, double)>& fn) {
    std::vector<double> u1(static_cast<std::size_t>(n * n)), u2(u1.size());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto v = fn(shearflow::kTwoPi * i / n, shearflow::kTwoPi * j / n);
            u1[static_cast<std::size_t>(j * n + i)] = v[0];
            u2[static_cast<std::size_t>(j * n + i)] = v[1];
        }
    }
    return TorusField::from_grid(n, u1, u2);
}

/// Random solenoidal field with modes up to `band` and Gaussian coefficients.
inline TorusField random_solenoidal(int n, int band, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    TorusField w(n);
    for (int k1 = 0; k1 <= band; ++k1) {
        for (int k2 = -band; k2 <= band; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            const double decay = 1.0 / (1.0 + k1 * k1 + k2 * k2);
            for (int c = 0; c < 2; ++c) {
                w.set_coefficient(c, k1, k2, decay * shearflow::Complex(g(rng), g(rng)));
            }
        }
    }
    return shearflow::leray_project(w);
}

/// Samples a vector function at the channel nodes.
inline ChannelField channel_from(int n1, int n2, const std::function<std::array<double, 2>(double, double)>& fn) {
    ChannelField probe(n1, n2);
    std::vector<double> u1(static_cast<std::size_t>((n2 + 1) * n1)), u2(u1.size());
    for (int j = 0; j <= n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const auto v = fn(probe.x1(i), probe.x2(j));
            u1[static_cast<std::size_t>(j * n1 + i)] = v[0];
            u2[static_cast<std::size_t>(j * n1 + i)] = v[1];
        }
    }
    return ChannelField::from_nodes(n1, n2, u1, u2);
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::current_path() / "scratch" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline double observed_order(double coarse, double fine, double ratio = 2.0) {
    return std::log(coarse / fine) / std::log(ratio);
}

} // namespace testing
