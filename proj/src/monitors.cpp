#include "shearflow/monitors.hpp"

#include "shearflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace shearflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
double quadrature(const PointwiseState& s, F&& integrand) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sum += s.weight[i] * integrand(i);
    }
    return sum;
}

double grad_du_squared(const PointwiseState& s, std::size_t i, int axis) {
    const SymTensor2 g = s.sym_grad_derivative(i, axis);
    return contract(g, g);
}

void require_hessian(const PointwiseState& s, const char* what) {
    if (!s.has_hessian()) {
        throw InvalidInput(std::string(what) + ": second derivatives are required");
    }
}

/// Weight (delta+|Du|)^(p-2); at delta = 0, Du = 0 the weighted integrands
/// vanish at least quadratically, so the product is taken as 0 there.
double safe_weight(const SymTensor2& d, const StressParams& params) {
    const double w = stress_weight(d.frobenius_norm(), params);
    return std::isfinite(w) ? w : 0.0;
}

} // namespace

SymTensor2 PointwiseState::sym_grad(std::size_t i) const {
    return {grad[0][i], 0.5 * (grad[1][i] + grad[2][i]), grad[3][i]};
}

SymTensor2 PointwiseState::sym_grad_derivative(std::size_t i, int axis) const {
    const auto a = static_cast<std::size_t>(axis);
    // d_a D11 = d_a d_1 u1, d_a D22 = d_a d_2 u2, d_a D12 = (d_a d_2 u1 + d_a d_1 u2)/2
    return {hess[0 + 2 * a + 0][i], 0.5 * (hess[0 + 2 * a + 1][i] + hess[4 + 2 * a + 0][i]), hess[4 + 2 * a + 1][i]};
}

double l2_norm(const PointwiseState& s) {
    return std::sqrt(quadrature(s, [&](std::size_t i) { return s.u[0][i] * s.u[0][i] + s.u[1][i] * s.u[1][i]; }));
}

double grad_l2_norm(const PointwiseState& s) {
    return std::sqrt(quadrature(s, [&](std::size_t i) {
        double v = 0.0;
        for (const auto& g : s.grad) {
            v += g[i] * g[i];
        }
        return v;
    }));
}

double sobolev_norm(const PointwiseState& s, int order, double q) {
    if (order < 0 || order > 2) {
        throw InvalidInput("sobolev norm: order must be 0, 1 or 2");
    }
    if (!(q >= 1.0) || !std::isfinite(q)) {
        throw InvalidInput("sobolev norm: exponent must lie in [1, inf)");
    }
    if (order == 2) {
        require_hessian(s, "sobolev norm");
    }
    static constexpr double binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
    const double total = quadrature(s, [&](std::size_t i) {
        double m0 = s.u[0][i] * s.u[0][i] + s.u[1][i] * s.u[1][i];
        double m1 = 0.0;
        double m2 = 0.0;
        if (order >= 1) {
            for (const auto& g : s.grad) {
                m1 += g[i] * g[i];
            }
        }
        if (order >= 2) {
            for (const auto& h : s.hess) {
                m2 += h[i] * h[i];
            }
        }
        const double sum = binom[order][0] * m0 + binom[order][1] * m1 + binom[order][2] * m2;
        return q == 2.0 ? sum : std::pow(sum, 0.5 * q);
    });
    return std::pow(total, 1.0 / q);
}

double sym_grad_lp_norm(const PointwiseState& s, double q) {
    return std::pow(quadrature(s, [&](std::size_t i) { return std::pow(s.sym_grad(i).frobenius_norm(), q); }), 1.0 / q);
}

double functional_I(const PointwiseState& s, const StressParams& params) {
    require_hessian(s, "functional_I");
    return quadrature(s, [&](std::size_t i) {
        const double g2 = grad_du_squared(s, i, 0) + grad_du_squared(s, i, 1);
        return g2 == 0.0 ? 0.0 : safe_weight(s.sym_grad(i), params) * g2;
    });
}

double functional_I1(const PointwiseState& s, const StressParams& params) {
    require_hessian(s, "functional_I1");
    return quadrature(s, [&](std::size_t i) {
        const double g2 = grad_du_squared(s, i, 0);
        return g2 == 0.0 ? 0.0 : safe_weight(s.sym_grad(i), params) * g2;
    });
}

double functional_J(const PointwiseState& s, const PointwiseState& ut, const StressParams& params) {
    if (ut.size() != s.size()) {
        throw InvalidInput("functional_J: time derivative lives on a different grid");
    }
    return quadrature(s, [&](std::size_t i) {
        const SymTensor2 dt = ut.sym_grad(i);
        const double g2 = contract(dt, dt);
        return g2 == 0.0 ? 0.0 : safe_weight(s.sym_grad(i), params) * g2;
    });
}

double functional_M(const PointwiseState& s, const StressParams& params) {
    return quadrature(s, [&](std::size_t i) { return potential_scalar(s.sym_grad(i).frobenius_norm(), params); });
}

double stress_power(const PointwiseState& s, const StressParams& params) {
    return quadrature(s, [&](std::size_t i) {
        const SymTensor2 d = s.sym_grad(i);
        return contract(stress(d, params), d);
    });
}

double stress_rate_pairing(const PointwiseState& s, const PointwiseState& ut, const StressParams& params) {
    if (ut.size() != s.size()) {
        throw InvalidInput("stress_rate_pairing: time derivative lives on a different grid");
    }
    return quadrature(s, [&](std::size_t i) { return contract(stress(s.sym_grad(i), params), ut.sym_grad(i)); });
}

double forcing_power(const PointwiseState& s, std::span<const double> f1, std::span<const double> f2) {
    if (f1.empty() && f2.empty()) {
        return 0.0;
    }
    if (f1.size() != s.size() || f2.size() != s.size()) {
        throw InvalidInput("forcing_power: forcing lives on a different grid");
    }
    return quadrature(s, [&](std::size_t i) { return f1[i] * s.u[0][i] + f2[i] * s.u[1][i]; });
}

void WeightedAccumulator::update(double t, double value) {
    if (!std::isfinite(t) || !std::isfinite(value)) {
        throw InvalidInput("weighted accumulator: non-finite sample");
    }
    const double weighted = (mode_ == WeightMode::linear_t ? t : 1.0) * value;
    if (samples_ > 0) {
        if (t < last_t_) {
            throw InvalidInput("weighted accumulator: time went backwards");
        }
        integral_ += 0.5 * (t - last_t_) * (weighted + last_weighted_);
    }
    last_t_ = t;
    last_weighted_ = weighted;
    ++samples_;
}

void RegularityReport::append(std::vector<double> row) {
    if (row.size() != columns_.size()) {
        throw InvalidInput("report: row width does not match the column count");
    }
    rows_.push_back(std::move(row));
}

std::optional<std::size_t> RegularityReport::column_index(const std::string& name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> RegularityReport::column(const std::string& name) const {
    const auto idx = column_index(name);
    if (!idx) {
        throw InvalidInput("report: missing column '" + name + "'");
    }
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) {
        out.push_back(r[*idx]);
    }
    return out;
}

double RegularityReport::last(const std::string& name) const {
    const auto idx = column_index(name);
    if (!idx) {
        throw InvalidInput("report: missing column '" + name + "'");
    }
    if (rows_.empty()) {
        throw InvalidInput("report: no samples");
    }
    return rows_.back()[*idx];
}

std::string RegularityReport::to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        out += columns_[c];
        out += c + 1 < columns_.size() ? ',' : '\n';
    }
    char buf[64];
    for (const auto& r : rows_) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (std::isnan(r[c])) {
                out += "nan";
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", r[c]);
                out += buf;
            }
            out += c + 1 < r.size() ? ',' : '\n';
        }
    }
    return out;
}

RegularityReport RegularityReport::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw InvalidInput("report csv: empty input");
    }
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream cells(s);
        while (std::getline(cells, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
                cell.pop_back();
            }
            out.push_back(cell);
        }
        return out;
    };
    RegularityReport report(split(line));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != report.columns_.size()) {
            throw InvalidInput("report csv: line " + std::to_string(lineno) + " has " + std::to_string(cells.size())
                               + " cells, expected " + std::to_string(report.columns_.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            if (c == "nan" || c.empty()) {
                row.push_back(kNaN);
                continue;
            }
            try {
                std::size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (used != c.size()) {
                    throw std::invalid_argument(c);
                }
            } catch (const std::exception&) {
                throw InvalidInput("report csv: line " + std::to_string(lineno) + ": not a number '" + c + "'");
            }
        }
        report.rows_.push_back(std::move(row));
    }
    return report;
}

const std::vector<std::string>& base_report_columns() {
    static const std::vector<std::string> cols{
        "t",        "l2",       "grad_l2",   "h2",       "Du_lp",    "energy_residual",
        "I",        "I1",       "J",         "M",        "ut_l2",    "int_grad2",
        "int_t_h2", "int_Du_pp", "int_t_I1", "int_l2_p", "int_h2"};
    return cols;
}

ReportBuilder::ReportBuilder(StressParams params, std::vector<std::string> extra_columns)
    : params_(params), extra_count_(extra_columns.size()) {
    std::vector<std::string> cols = base_report_columns();
    cols.insert(cols.end(), extra_columns.begin(), extra_columns.end());
    report_ = RegularityReport(std::move(cols));
}

void ReportBuilder::add_sample(double t, const PointwiseState& u, const PointwiseState* ut,
                               std::span<const double> f1, std::span<const double> f2,
                               std::span<const double> extras) {
    if (extras.size() != extra_count_) {
        throw InvalidInput("report builder: wrong number of extra values");
    }
    const double l2 = l2_norm(u);
    const double grad_l2 = grad_l2_norm(u);
    const double h2 = sobolev_norm(u, 2, 2.0);
    const double du_lp = sym_grad_lp_norm(u, params_.p);
    const double energy = 0.5 * l2 * l2;
    const double dissipation = params_.nu0 * grad_l2 * grad_l2 + params_.nu1 * stress_power(u, params_)
        - forcing_power(u, f1, f2);
    const double i_full = functional_I(u, params_);
    const double i1 = functional_I1(u, params_);

    if (report_.empty()) {
        initial_energy_ = energy;
    }
    dissipation_.update(t, dissipation);
    grad2_.update(t, grad_l2 * grad_l2);
    t_h2_.update(t, h2 * h2);
    du_pp_.update(t, std::pow(du_lp, params_.p));
    t_i1_.update(t, i1);
    l2_p_.update(t, std::pow(l2, params_.p));
    h2_.update(t, h2 * h2);

    const double residual = std::abs(energy + dissipation_.integral() - initial_energy_);
    const double j = ut ? functional_J(u, *ut, params_) : kNaN;
    const double ut_l2 = ut ? l2_norm(*ut) : kNaN;

    std::vector<double> row{t,
                            l2,
                            grad_l2,
                            h2,
                            du_lp,
                            residual,
                            i_full,
                            i1,
                            j,
                            functional_M(u, params_),
                            ut_l2,
                            grad2_.integral(),
                            t_h2_.integral(),
                            du_pp_.integral(),
                            t_i1_.integral(),
                            l2_p_.integral(),
                            h2_.integral()};
    row.insert(row.end(), extras.begin(), extras.end());
    report_.append(std::move(row));
}

double energy_balance_residual(double energy_s0, double energy_s, std::span<const double> times,
                               std::span<const double> dissipation_minus_work) {
    if (times.size() != dissipation_minus_work.size()) {
        throw InvalidInput("energy_balance_residual: sample count mismatch");
    }
    WeightedAccumulator acc;
    for (std::size_t i = 0; i < times.size(); ++i) {
        acc.update(times[i], dissipation_minus_work[i]);
    }
    return std::abs(energy_s + acc.integral() - energy_s0);
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

struct LevelIntegrals {
    double lp = 0.0;
    double weighted = 0.0;
};

LevelIntegrals level_integrals(const RegularityReport& report, double p_exponent) {
    const auto t = report.column("t");
    const auto l2 = report.column("l2");
    const auto weighted = report.column("int_t_h2");
    WeightedAccumulator acc;
    for (std::size_t i = 0; i < t.size(); ++i) {
        acc.update(t[i], std::pow(l2[i], p_exponent));
    }
    return {acc.integral(), weighted.empty() ? 0.0 : weighted.back()};
}

double relative_change(double coarse, double fine) {
    if (coarse == 0.0 && fine == 0.0) {
        return 0.0;
    }
    return (fine - coarse) / std::max(std::abs(coarse), std::numeric_limits<double>::min());
}

} // namespace

DashtiRobinsonResult dashti_robinson_check(std::span<const RefinementLevel> ladder, double p_exponent,
                                           const DashtiRobinsonThresholds& thresholds) {
    if (ladder.empty()) {
        throw InvalidInput("dashti_robinson_check: empty ladder");
    }
    if (!(p_exponent > 1.0)) {
        throw InvalidInput("dashti_robinson_check: time exponent must exceed 1");
    }
    DashtiRobinsonResult out;
    std::vector<LevelIntegrals> levels;
    for (const auto& level : ladder) {
        levels.push_back(level_integrals(level.report, p_exponent));
        out.weighted_by_level.push_back(levels.back().weighted);
    }
    out.lp_l2_integral = levels.back().lp;
    out.weighted_h2_integral = levels.back().weighted;

    const bool finite = std::isfinite(out.lp_l2_integral) && std::isfinite(out.weighted_h2_integral);
    if (!finite) {
        out.verdict = Verdict::violated;
        return out;
    }
    if (out.lp_l2_integral == 0.0 && out.weighted_h2_integral == 0.0) {
        out.verdict = Verdict::satisfied;
        return out;
    }
    if (levels.size() < 2) {
        out.verdict = Verdict::inconclusive;
        return out;
    }
    const auto& coarse = levels[levels.size() - 2];
    const auto& fine = levels.back();
    out.lp_change = relative_change(coarse.lp, fine.lp);
    out.weighted_change = relative_change(coarse.weighted, fine.weighted);
    if (out.lp_change >= thresholds.divergent_growth || out.weighted_change >= thresholds.divergent_growth) {
        out.verdict = Verdict::violated;
    } else if (std::abs(out.lp_change) <= thresholds.stable_change
               && std::abs(out.weighted_change) <= thresholds.stable_change) {
        out.verdict = Verdict::satisfied;
    } else {
        out.verdict = Verdict::inconclusive;
    }
    return out;
}

DashtiRobinsonResult dashti_robinson_check(const RegularityReport& report, double p_exponent,
                                           const DashtiRobinsonThresholds& thresholds) {
    const RefinementLevel single{0, report};
    return dashti_robinson_check(std::span<const RefinementLevel>(&single, 1), p_exponent, thresholds);
}

} // namespace shearflow
