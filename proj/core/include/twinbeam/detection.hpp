#pragma once

// Intensity and homodyne detection on Gaussian states.
//
// Joint homodyne variables are normalized so the two-mode vacuum gives 1
// (0 dB). Intensity-difference noise is normalized by the total mean photon
// number, the shot noise of coherent beams of the same powers.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "twinbeam/errors.hpp"
#include "twinbeam/gaussian_state.hpp"

namespace twinbeam {

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kBrightBeamThreshold = 1e-12;
inline constexpr double kJointVacuumVariance = 1.0;

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

struct HomodyneSpec {
    // LO spatial profile over the pixels of one beam, unit L2 norm.
    std::vector<double> weights;
    double lo_phase = 0.0;
    double efficiency = 1.0;

    void validate() const;

    // LO matched to a single pixel of a beam with `pixels` pixels.
    static HomodyneSpec single_pixel(std::size_t pixel, std::size_t pixels = 1, double lo_phase = 0.0,
                                     double efficiency = 1.0);
};

class NoiseTrace {
public:
    // Throws ValidationError unless abscissa is strictly increasing and all values are finite.
    NoiseTrace(std::vector<double> abscissa, std::vector<double> values_db, std::string label);

    const std::vector<double>& abscissa() const { return abscissa_; }
    const std::vector<double>& values_db() const { return values_db_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return abscissa_.size(); }

    // "# label\nabscissa,value_db\n" followed by one "%.9g,%.9g" row per point.
    std::string to_csv() const;
    static NoiseTrace from_csv(const std::string& text, const std::string& source = "<csv>");

private:
    std::vector<double> abscissa_;
    std::vector<double> values_db_;
    std::string label_;
};

struct TechnicalNoiseSpec {
    double electronic_floor_db = -std::numeric_limits<double>::infinity();
    double pump_scatter_db = -std::numeric_limits<double>::infinity();

    void validate() const;
    bool enabled() const { return std::isfinite(electronic_floor_db) || std::isfinite(pump_scatter_db); }
};

// Constant floors added in linear power to every point.
NoiseTrace apply_technical_noise(const NoiseTrace& trace, const TechnicalNoiseSpec& spec);

enum class JointSignal { Difference, Sum };

enum class PhaseMode {
    // Both detectors follow the global scan phase.
    Synchronous,
    // Each detector adds its spec's lo_phase to the global phase.
    Independent,
};

struct PhaseScan {
    NoiseTrace diff;
    NoiseTrace sum;
};

namespace detail {

void require_intensity_sets(const std::vector<ModeLabel>& probe_set, const std::vector<ModeLabel>& conj_set);

inline PhotonFunctional difference_functional(const std::vector<ModeLabel>& probe_set,
                                              const std::vector<ModeLabel>& conj_set) {
    PhotonFunctional f;
    for (const auto& m : probe_set) f.push_back({m, 1.0});
    for (const auto& m : conj_set) f.push_back({m, -1.0});
    return f;
}

inline PhotonFunctional total_functional(const std::vector<ModeLabel>& probe_set,
                                         const std::vector<ModeLabel>& conj_set) {
    PhotonFunctional f;
    for (const auto& m : probe_set) f.push_back({m, 1.0});
    for (const auto& m : conj_set) f.push_back({m, 1.0});
    return f;
}

// sqrt(scale) * A_theta for the LO mode of `spec` on `beam`.
template <MeasurableState State>
QuadratureFunctional homodyne_functional(const State& state, const HomodyneSpec& spec, Beam beam, double theta,
                                         double scale) {
    spec.validate();
    const std::size_t pixels = state.beam_pixel_count(beam);
    if (spec.weights.size() != pixels) {
        throw ValidationError("LO has " + std::to_string(spec.weights.size()) + " weights but the " +
                              to_string(beam) + " beam has " + std::to_string(pixels) + " pixels");
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    QuadratureFunctional f;
    for (std::size_t k = 0; k < pixels; ++k) {
        const double w = spec.weights[k];
        if (w == 0.0) continue;
        f.push_back({ModeLabel{beam, k, {}}, scale * w * c, scale * w * s});
    }
    return f;
}

}  // namespace detail

template <MeasurableState State>
double sql_intensity_difference(const State& state, const std::vector<ModeLabel>& probe_set,
                                const std::vector<ModeLabel>& conj_set) {
    detail::require_intensity_sets(probe_set, conj_set);
    return state.photon_sum_moments(detail::total_functional(probe_set, conj_set)).mean;
}

// Var(N_probe - N_conj) / (<N_probe> + <N_conj>), linear.
template <MeasurableState State>
double intensity_difference_ratio(const State& state, const std::vector<ModeLabel>& probe_set,
                                  const std::vector<ModeLabel>& conj_set) {
    const double sql = sql_intensity_difference(state, probe_set, conj_set);
    if (!(sql > kBrightBeamThreshold)) {
        throw MeasurementUndefined("bright-beam measurement undefined: no mean photons in the detected beams");
    }
    return state.photon_sum_moments(detail::difference_functional(probe_set, conj_set)).variance / sql;
}

template <MeasurableState State>
double intensity_difference_db(const State& state, const std::vector<ModeLabel>& probe_set,
                               const std::vector<ModeLabel>& conj_set) {
    return to_db(intensity_difference_ratio(state, probe_set, conj_set));
}

// Bright-beam linearization: delta n_k ~ m_k . delta r_k.
template <MeasurableState State>
double linearized_intensity_difference_db(const State& state, const std::vector<ModeLabel>& probe_set,
                                          const std::vector<ModeLabel>& conj_set) {
    detail::require_intensity_sets(probe_set, conj_set);
    QuadratureFunctional f;
    double sql = 0.0;
    auto add = [&](const ModeLabel& m, double sign) {
        const Quadrature q = state.mode_mean(m);
        f.push_back({m, sign * q.x, sign * q.p});
        sql += 0.5 * (q.x * q.x + q.p * q.p);
    };
    for (const auto& m : probe_set) add(m, 1.0);
    for (const auto& m : conj_set) add(m, -1.0);
    if (!(sql > kBrightBeamThreshold)) {
        throw MeasurementUndefined("bright-beam measurement undefined: no mean photons in the detected beams");
    }
    return to_db(state.functional_variance(f) / sql);
}

// Variance of A_theta = X cos(theta) + P sin(theta) for the LO mode, with
// detection efficiency mixing in vacuum: eta V + (1 - eta) / 2.
template <MeasurableState State>
double homodyne_variance(const State& state, const HomodyneSpec& spec, Beam beam) {
    const double v = state.functional_variance(detail::homodyne_functional(state, spec, beam, spec.lo_phase, 1.0));
    return spec.efficiency * v + (1.0 - spec.efficiency) * kVacuumVariance;
}

// Variance of the hybrid-junction output (difference or sum of the two
// homodyne signals) at LO phases theta_probe / theta_conj. Vacuum gives 1.
template <MeasurableState State>
double joint_homodyne_variance(const State& state, const HomodyneSpec& probe_spec, const HomodyneSpec& conj_spec,
                               JointSignal signal, double theta_probe, double theta_conj) {
    QuadratureFunctional f = detail::homodyne_functional(state, probe_spec, Beam::Probe, theta_probe,
                                                         std::sqrt(probe_spec.efficiency));
    const double sign = signal == JointSignal::Difference ? -1.0 : 1.0;
    for (auto& term : detail::homodyne_functional(state, conj_spec, Beam::Conjugate, theta_conj,
                                                  sign * std::sqrt(conj_spec.efficiency))) {
        f.push_back(std::move(term));
    }
    return state.functional_variance(f) + (1.0 - probe_spec.efficiency) * kVacuumVariance +
           (1.0 - conj_spec.efficiency) * kVacuumVariance;
}

template <MeasurableState State>
double joint_variance_at(const State& state, const HomodyneSpec& probe_spec, const HomodyneSpec& conj_spec,
                         JointSignal signal, double theta, PhaseMode mode = PhaseMode::Synchronous) {
    const double tp = mode == PhaseMode::Independent ? theta + probe_spec.lo_phase : theta;
    const double tc = mode == PhaseMode::Independent ? theta + conj_spec.lo_phase : theta;
    return joint_homodyne_variance(state, probe_spec, conj_spec, signal, tp, tc);
}

// Scans the global LO phase; values in dB relative to the joint vacuum.
template <MeasurableState State>
PhaseScan joint_phase_scan(const State& state, const HomodyneSpec& probe_spec, const HomodyneSpec& conj_spec,
                           const std::vector<double>& phases, PhaseMode mode = PhaseMode::Synchronous) {
    if (phases.empty()) throw ValidationError("phase scan needs at least one phase");
    std::vector<double> diff(phases.size());
    std::vector<double> sum(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        diff[i] = to_db(joint_variance_at(state, probe_spec, conj_spec, JointSignal::Difference, phases[i], mode) /
                        kJointVacuumVariance);
        sum[i] = to_db(joint_variance_at(state, probe_spec, conj_spec, JointSignal::Sum, phases[i], mode) /
                       kJointVacuumVariance);
    }
    return {NoiseTrace(phases, std::move(diff), "difference"), NoiseTrace(phases, std::move(sum), "sum")};
}

// k * 2 pi / steps for k = 0 .. steps - 1.
std::vector<double> uniform_phases(std::size_t steps);

}  // namespace twinbeam
