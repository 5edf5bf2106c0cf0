#include "shearflow/fft.hpp"

#include "shearflow/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace shearflow::fft {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <class T>
struct FftwBuffer {
    explicit FftwBuffer(std::size_t count) : ptr(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)))) {
        if (ptr == nullptr) {
            throw std::bad_alloc();
        }
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    T* ptr;
};

void check_sizes(std::size_t a, std::size_t expected_a, std::size_t b, std::size_t expected_b) {
    if (a != expected_a || b != expected_b) {
        throw InvalidInput("fft: buffer size mismatch");
    }
}

} // namespace

Plan2D::Plan2D(int n) : n_(n) {
    if (n < 2 || n % 2 != 0) {
        throw InvalidInput("fft: resolution must be even and >= 2");
    }
    const auto real_count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    const auto cplx_count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
    FftwBuffer<double> r(real_count);
    FftwBuffer<fftw_complex> c(cplx_count);
    forward_plan_ = fftw_plan_dft_r2c_2d(n, n, r.ptr, c.ptr, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_2d(n, n, c.ptr, r.ptr, FFTW_ESTIMATE);
}

Plan2D::~Plan2D() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

const Plan2D& Plan2D::get(int n) {
    std::lock_guard lock(planner_mutex());
    static std::map<int, std::unique_ptr<Plan2D>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::unique_ptr<Plan2D>(new Plan2D(n))).first;
    }
    return *it->second;
}

void Plan2D::forward(std::span<const double> grid, std::span<Complex> spectrum) const {
    const auto real_count = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
    const auto cplx_count = static_cast<std::size_t>(n_) * static_cast<std::size_t>(spectral_cols());
    check_sizes(grid.size(), real_count, spectrum.size(), cplx_count);
    FftwBuffer<double> r(real_count);
    FftwBuffer<fftw_complex> c(cplx_count);
    std::copy(grid.begin(), grid.end(), r.ptr);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), r.ptr, c.ptr);
    const double scale = 1.0 / static_cast<double>(real_count);
    for (std::size_t i = 0; i < cplx_count; ++i) {
        spectrum[i] = Complex(c.ptr[i][0] * scale, c.ptr[i][1] * scale);
    }
}

void Plan2D::inverse(std::span<const Complex> spectrum, std::span<double> grid) const {
    const auto real_count = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
    const auto cplx_count = static_cast<std::size_t>(n_) * static_cast<std::size_t>(spectral_cols());
    check_sizes(grid.size(), real_count, spectrum.size(), cplx_count);
    FftwBuffer<double> r(real_count);
    FftwBuffer<fftw_complex> c(cplx_count);
    for (std::size_t i = 0; i < cplx_count; ++i) {
        c.ptr[i][0] = spectrum[i].real();
        c.ptr[i][1] = spectrum[i].imag();
    }
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), c.ptr, r.ptr);
    std::copy(r.ptr, r.ptr + real_count, grid.begin());
}

PlanRows::PlanRows(int n, int rows) : n_(n), rows_(rows) {
    if (n < 2 || n % 2 != 0 || rows < 1) {
        throw InvalidInput("fft: row length must be even and >= 2");
    }
    const int cols = n / 2 + 1;
    FftwBuffer<double> r(static_cast<std::size_t>(n) * static_cast<std::size_t>(rows));
    FftwBuffer<fftw_complex> c(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows));
    int len[1] = {n};
    forward_plan_ = fftw_plan_many_dft_r2c(1, len, rows, r.ptr, nullptr, 1, n, c.ptr, nullptr, 1, cols, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_many_dft_c2r(1, len, rows, c.ptr, nullptr, 1, cols, r.ptr, nullptr, 1, n, FFTW_ESTIMATE);
}

PlanRows::~PlanRows() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

const PlanRows& PlanRows::get(int n, int rows) {
    std::lock_guard lock(planner_mutex());
    static std::map<std::pair<int, int>, std::unique_ptr<PlanRows>> cache;
    auto key = std::make_pair(n, rows);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::unique_ptr<PlanRows>(new PlanRows(n, rows))).first;
    }
    return *it->second;
}

void PlanRows::forward(std::span<const double> grid, std::span<Complex> spectrum) const {
    const auto real_count = static_cast<std::size_t>(n_) * static_cast<std::size_t>(rows_);
    const auto cplx_count = static_cast<std::size_t>(spectral_cols()) * static_cast<std::size_t>(rows_);
    check_sizes(grid.size(), real_count, spectrum.size(), cplx_count);
    FftwBuffer<double> r(real_count);
    FftwBuffer<fftw_complex> c(cplx_count);
    std::copy(grid.begin(), grid.end(), r.ptr);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), r.ptr, c.ptr);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < cplx_count; ++i) {
        spectrum[i] = Complex(c.ptr[i][0] * scale, c.ptr[i][1] * scale);
    }
}

void PlanRows::inverse(std::span<const Complex> spectrum, std::span<double> grid) const {
    const auto real_count = static_cast<std::size_t>(n_) * static_cast<std::size_t>(rows_);
    const auto cplx_count = static_cast<std::size_t>(spectral_cols()) * static_cast<std::size_t>(rows_);
    check_sizes(grid.size(), real_count, spectrum.size(), cplx_count);
    FftwBuffer<double> r(real_count);
    FftwBuffer<fftw_complex> c(cplx_count);
    for (std::size_t i = 0; i < cplx_count; ++i) {
        c.ptr[i][0] = spectrum[i].real();
        c.ptr[i][1] = spectrum[i].imag();
    }
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), c.ptr, r.ptr);
    std::copy(r.ptr, r.ptr + real_count, grid.begin());
}

} // namespace shearflow::fft
