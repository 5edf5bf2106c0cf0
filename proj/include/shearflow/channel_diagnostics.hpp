#pragma once

/// @file channel_diagnostics.hpp
/// @brief Normal-derivative recovery and pressure diagnostics on channel states.
///
/// The x1 momentum balance is split as
///   nu0 Lap u1 + nu1 (div S)_1 = alpha1 d22 u1 + F1,
/// so d22 u1 can be recovered from the other second derivatives, the time
/// derivative, the pressure and the forcing. All grids are node grids
/// ((n2+1) x n1, row-major); wall rows are excluded from residuals.

#include "shearflow/channel_field.hpp"
#include "shearflow/constitutive.hpp"
#include "shearflow/pointwise.hpp"

#include <span>
#include <vector>

namespace shearflow {

/// Second derivatives other than d22 u1. The mixed entries count twice in
/// the squared norm (d12 = d21).
struct D2StarField {
    std::vector<double> d11u1;
    std::vector<double> d12u1;
    std::vector<double> d11u2;
    std::vector<double> d12u2;
    std::vector<double> d22u2;

    [[nodiscard]] double norm_squared(std::size_t i) const;
};

D2StarField d2star_field(const PointwiseState& s);
double d2star_l2(const PointwiseState& s);
double d22u1_l2(const PointwiseState& s);

struct Alpha1Field {
    std::vector<double> values;
    std::vector<double> lower_bound; ///< nu0 + nu1 (p - 3/2) (delta + |Du|)^(p-2)
    double min = 0.0;
    double min_lower_bound = 0.0;
};

/// Pointwise alpha1. Throws DomainError for p < 3/2 and SingularPoint where
/// delta = 0 and Du = 0.
Alpha1Field alpha1_field(const PointwiseState& s, const StressParams& params);
Alpha1Field alpha1_field(const ChannelField& u, const StressParams& params);

struct RecoveryResult {
    std::vector<double> recovered; ///< d22 u1 from the momentum balance (0 on walls)
    std::vector<double> direct;    ///< three-point d22 u1 (0 on walls)
    std::vector<double> f1;        ///< F1 at the nodes
    double residual = 0.0;         ///< L2 (interior) of recovered - direct
    /// max over interior nodes of |F1| / ([nu0 + nu1 (p - 3/2) w] |D2+ u|)
    double f1_bound_ratio = 0.0;
};

/// `ut` may be null (taken as zero). `f1` holds forcing node values or is empty.
/// Convection is included in the balance when `with_convection` is set.
/// Throws NumericalFailure if alpha1 is not positive somewhere.
RecoveryResult recover_d22u1(const ChannelField& u, const ChannelField* ut, std::span<const double> f1,
                             const StressParams& params, bool with_convection = true);

struct PressureDiagnostics {
    double dpi1_l2 = 0.0;
    double dpi2_l2 = 0.0;
    /// ||d1 pi - mean|| / ||G|| with grad(d1 pi) = div G; NaN without u_t.
    double necas_ratio = 0.0;
};

PressureDiagnostics pressure_gradient_diagnostics(const ChannelField& u, const ChannelField* ut,
                                                  std::span<const double> f1, std::span<const double> f2,
                                                  const StressParams& params);

} // namespace shearflow
