#pragma once

/// @file monitors.hpp
/// @brief Regularity functionals, energy balance and the trajectory-uniqueness check.
///
/// Functionals are evaluated by quadrature over a PointwiseState, which each
/// geometry builds with its own differentiation (spectral on the torus,
/// Fourier x finite differences in the channel).

#include "shearflow/constitutive.hpp"
#include "shearflow/pointwise.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shearflow {

// Quadrature-based norms and functionals.
double l2_norm(const PointwiseState& s);
double grad_l2_norm(const PointwiseState& s);
/// (int (sum_j binom(k,j) |grad^j u|^2)^(q/2))^(1/q); order 2 needs the Hessian.
double sobolev_norm(const PointwiseState& s, int order, double q);
double sym_grad_lp_norm(const PointwiseState& s, double q);

/// I(u) = int (delta+|Du|)^(p-2) |grad Du|^2.
double functional_I(const PointwiseState& s, const StressParams& params);
/// I1(u) = int (delta+|Du|)^(p-2) |d1 Du|^2.
double functional_I1(const PointwiseState& s, const StressParams& params);
/// J(u) = int (delta+|Du|)^(p-2) |D u_t|^2; `ut` needs only its gradient.
double functional_J(const PointwiseState& s, const PointwiseState& ut, const StressParams& params);
/// M(u) = int M(|Du|).
double functional_M(const PointwiseState& s, const StressParams& params);
/// <S(Du), Du> integrated.
double stress_power(const PointwiseState& s, const StressParams& params);
/// <S(Du), D u_t> integrated (the time derivative of M along the flow).
double stress_rate_pairing(const PointwiseState& s, const PointwiseState& ut, const StressParams& params);
/// (f, u) integrated.
double forcing_power(const PointwiseState& s, std::span<const double> f1, std::span<const double> f2);

enum class WeightMode { none, linear_t };

/// Trapezoidal accumulation of int w(t) value(t) dt over monitor samples.
class WeightedAccumulator {
public:
    explicit WeightedAccumulator(WeightMode mode = WeightMode::none) : mode_(mode) {}

    /// Throws InvalidInput if t decreases or value is not finite.
    void update(double t, double value);
    [[nodiscard]] double integral() const { return integral_; }
    [[nodiscard]] std::size_t samples() const { return samples_; }

private:
    WeightMode mode_;
    double integral_ = 0.0;
    double last_t_ = 0.0;
    double last_weighted_ = 0.0;
    std::size_t samples_ = 0;
};

/// Column table of monitor samples with a fixed column order.
class RegularityReport {
public:
    RegularityReport() = default;
    explicit RegularityReport(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }
    [[nodiscard]] const std::vector<std::vector<double>>& rows() const { return rows_; }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }
    [[nodiscard]] bool empty() const { return rows_.empty(); }

    void append(std::vector<double> row);
    [[nodiscard]] std::optional<std::size_t> column_index(const std::string& name) const;
    /// Values of one column; throws InvalidInput if it is missing.
    [[nodiscard]] std::vector<double> column(const std::string& name) const;
    [[nodiscard]] double last(const std::string& name) const;

    /// CSV with a header line; numbers printed with 17 significant digits,
    /// absent values as "nan".
    [[nodiscard]] std::string to_csv() const;
    static RegularityReport from_csv(const std::string& text);

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

/// Columns written for every geometry, in order.
const std::vector<std::string>& base_report_columns();

/// Incrementally builds a RegularityReport from solver states.
class ReportBuilder {
public:
    explicit ReportBuilder(StressParams params, std::vector<std::string> extra_columns = {});

    /// `ut` may be null (J and ||u_t|| are then reported as absent); `f1`/`f2`
    /// may be empty for zero forcing. `extras` must match the extra columns.
    void add_sample(double t, const PointwiseState& u, const PointwiseState* ut,
                    std::span<const double> f1, std::span<const double> f2,
                    std::span<const double> extras = {});

    [[nodiscard]] const RegularityReport& report() const { return report_; }
    [[nodiscard]] RegularityReport take() { return std::move(report_); }

private:
    StressParams params_;
    std::size_t extra_count_;
    RegularityReport report_;
    double initial_energy_ = 0.0;
    WeightedAccumulator dissipation_{WeightMode::none};
    WeightedAccumulator grad2_{WeightMode::none};
    WeightedAccumulator t_h2_{WeightMode::linear_t};
    WeightedAccumulator du_pp_{WeightMode::none};
    WeightedAccumulator t_i1_{WeightMode::linear_t};
    WeightedAccumulator l2_p_{WeightMode::none};
    WeightedAccumulator h2_{WeightMode::none};
};

/// |1/2||u(s)||^2 + int (nu0 ||grad u||^2 + nu1 <S(Du),Du> - (f,u)) - 1/2||u(s0)||^2|
/// from sampled integrands (trapezoid). Times must be non-decreasing.
double energy_balance_residual(double energy_s0, double energy_s, std::span<const double> times,
                               std::span<const double> dissipation_minus_work);

enum class Verdict { satisfied, violated, inconclusive };

std::string to_string(Verdict v);

struct RefinementLevel {
    int resolution = 0;
    RegularityReport report;
};

struct DashtiRobinsonThresholds {
    double stable_change = 0.05;   ///< relative change at the last doubling counted as converged
    double divergent_growth = 0.5; ///< relative growth counted as divergence
};

struct DashtiRobinsonResult {
    Verdict verdict = Verdict::inconclusive;
    double lp_l2_integral = 0.0;     ///< int ||u||_2^p dt at the finest level
    double weighted_h2_integral = 0.0; ///< int t ||u||_{2,2}^2 dt at the finest level
    double lp_change = 0.0;          ///< relative change at the last refinement
    double weighted_change = 0.0;
    std::vector<double> weighted_by_level;
};

/// Uniqueness criterion in 2D: u in L^p(0,T;L^2) and sqrt(t) u in L^2(0,T;W^{2,2}),
/// judged from a refinement ladder (coarse to fine). Needs columns t, l2, int_t_h2.
DashtiRobinsonResult dashti_robinson_check(std::span<const RefinementLevel> ladder, double p_exponent,
                                           const DashtiRobinsonThresholds& thresholds = {});
DashtiRobinsonResult dashti_robinson_check(const RegularityReport& report, double p_exponent,
                                           const DashtiRobinsonThresholds& thresholds = {});

} // namespace shearflow
