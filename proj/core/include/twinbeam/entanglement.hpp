#pragma once

// Generalized-quadrature variances and the inseparability sum
// I = Var(X_-) + Var(P_+), which is below 2 only for entangled mode pairs.
// The criterion is evaluated for the measured mode pair picked out by the LO
// profiles, not for the state as a whole.

#include <cmath>
#include <numbers>
#include <string>

#include "twinbeam/detection.hpp"

namespace twinbeam {

inline constexpr double kSeparabilityBound = 2.0;
// Roundoff allowance: states exactly on the bound (vacuum, coherent) are not entangled.
inline constexpr double kEntanglementMargin = 1e-12;

struct EntanglementReport {
    double var_x_minus = kJointVacuumVariance;
    double var_p_plus = kJointVacuumVariance;
    double inseparability = kSeparabilityBound;
    double squeezing_db_x = 0.0;
    double squeezing_db_p = 0.0;
    // inseparability < kSeparabilityBound - kEntanglementMargin.
    bool entangled = false;

    // Fills the derived fields from the two variances.
    static EntanglementReport from_variances(double var_x_minus, double var_p_plus);

    // The six fields above, named exactly as declared.
    std::string to_json() const;
};

struct GeneralizedVariances {
    double x_minus = kJointVacuumVariance;
    double p_plus = kJointVacuumVariance;
};

// 10 log10(variance / reference). Both must be positive.
double squeezing_db(double variance, double reference);

// Var(X_-) from the difference signal at global phase phi and Var(P_+) from
// the sum signal at phi + pi/2.
template <MeasurableState State>
GeneralizedVariances generalized_variances(const State& state, const HomodyneSpec& probe_spec,
                                           const HomodyneSpec& conj_spec, double phi = 0.0,
                                           PhaseMode mode = PhaseMode::Synchronous) {
    return {joint_variance_at(state, probe_spec, conj_spec, JointSignal::Difference, phi, mode),
            joint_variance_at(state, probe_spec, conj_spec, JointSignal::Sum, phi + std::numbers::pi / 2.0, mode)};
}

struct PhaseOptimum {
    double phase = 0.0;
    GeneralizedVariances variances;
};

// Global LO phase minimizing Var(X_-)(phi) + Var(P_+)(phi). Both variances
// are quadratic forms in (cos phi, sin phi), so their sum is exactly
// a + b cos 2phi + c sin 2phi; three samples fix a, b, c.
template <MeasurableState State>
PhaseOptimum optimal_lo_phase(const State& state, const HomodyneSpec& probe_spec, const HomodyneSpec& conj_spec,
                              PhaseMode mode = PhaseMode::Synchronous) {
    auto objective = [&](double phi) {
        const auto v = generalized_variances(state, probe_spec, conj_spec, phi, mode);
        return v.x_minus + v.p_plus;
    };
    const double f0 = objective(0.0);
    const double f45 = objective(std::numbers::pi / 4.0);
    const double f90 = objective(std::numbers::pi / 2.0);
    const double a = 0.5 * (f0 + f90);
    const double b = 0.5 * (f0 - f90);
    const double c = f45 - a;
    const double phase = std::hypot(b, c) > 0.0 ? 0.5 * (std::atan2(c, b) + std::numbers::pi) : 0.0;
    return {phase, generalized_variances(state, probe_spec, conj_spec, phase, mode)};
}

template <MeasurableState State>
EntanglementReport inseparability(const State& state, const HomodyneSpec& probe_spec, const HomodyneSpec& conj_spec,
                                  bool optimize_phase = true, PhaseMode mode = PhaseMode::Synchronous) {
    const GeneralizedVariances v = optimize_phase
                                       ? optimal_lo_phase(state, probe_spec, conj_spec, mode).variances
                                       : generalized_variances(state, probe_spec, conj_spec, 0.0, mode);
    return EntanglementReport::from_variances(v.x_minus, v.p_plus);
}

}  // namespace twinbeam
