#include "twinbeam/fwm_amplifier.hpp"

#include <cmath>

#include "twinbeam/errors.hpp"

namespace twinbeam {

namespace {

// Two-mode squeezer from cosh r and sinh r, modes ordered (probe, conjugate).
Eigen::MatrixXd squeezer_matrix(double c, double s) {
    const Eigen::Matrix2d z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    Eigen::MatrixXd m(4, 4);
    m.block<2, 2>(0, 0) = c * Eigen::Matrix2d::Identity();
    m.block<2, 2>(0, 2) = s * z;
    m.block<2, 2>(2, 0) = s * z;
    m.block<2, 2>(2, 2) = c * Eigen::Matrix2d::Identity();
    return m;
}

void require_gain(double gain) {
    if (!(gain >= 1.0) || !std::isfinite(gain)) throw ValidationError("gain must be finite and >= 1");
}

void require_fraction(double value, const char* what) {
    if (!(value > 0.0 && value <= 1.0)) throw ValidationError(std::string(what) + " must lie in (0, 1]");
}

}  // namespace

double squeeze_parameter(double gain) {
    require_gain(gain);
    return std::acosh(std::sqrt(gain));
}

double gain_from_squeeze(double r) {
    const double c = std::cosh(r);
    return c * c;
}

double gain_for_joint_variance(double variance) {
    if (!(variance > 0.0 && variance <= 1.0)) throw ValidationError("joint variance must lie in (0, 1]");
    return gain_from_squeeze(-0.5 * std::log(variance));
}

SymplecticOp tms_symplectic(const TwoModeSqueezerSpec& spec) {
    require_gain(spec.gain);
    return SymplecticOp(squeezer_matrix(std::sqrt(spec.gain), std::sqrt(spec.gain - 1.0)),
                        {spec.probe, spec.conjugate});
}

GaussianState evolve_fwm(const GaussianState& state, double kappa, double t, const ModeLabel& probe,
                         const ModeLabel& conjugate) {
    const double kt = kappa * t;
    if (!(kt >= 0.0) || !std::isfinite(kt)) throw ValidationError("kappa * t must be finite and >= 0");
    return apply_symplectic(state, SymplecticOp(squeezer_matrix(std::cosh(kt), std::sinh(kt)), {probe, conjugate}));
}

GaussianState seeded_amplifier_output(double gain, double seed_x, double seed_p) {
    require_gain(gain);
    GaussianState s = vacuum_state({probe_mode(), conjugate_mode()});
    s = displace(s, probe_mode(), seed_x, seed_p);
    return apply_symplectic(s, tms_symplectic({gain, probe_mode(), conjugate_mode()}));
}

void CellModel::validate() const {
    if (n_slices < 1) throw ValidationError("cell needs at least one slice");
    require_gain(total_gain);
    require_fraction(probe_transmission, "probe transmission");
    require_fraction(conjugate_transmission, "conjugate transmission");
}

// Squeeze parameters add under composition, so a uniform medium splits r
// evenly; splitting G geometrically would not compose back to total_gain.
double CellModel::slice_gain() const { return gain_from_squeeze(squeeze_parameter(total_gain) / n_slices); }
double CellModel::slice_probe_transmission() const { return std::pow(probe_transmission, 1.0 / n_slices); }
double CellModel::slice_conjugate_transmission() const { return std::pow(conjugate_transmission, 1.0 / n_slices); }

GaussianState distributed_cell_output(const CellModel& cell, double seed_x, double seed_p) {
    cell.validate();
    const SymplecticOp gain = tms_symplectic({cell.slice_gain(), probe_mode(), conjugate_mode()});
    const bool lossy_probe = cell.probe_transmission < 1.0;
    const bool lossy_conj = cell.conjugate_transmission < 1.0;
    const GaussianChannel probe_loss = loss_channel(cell.slice_probe_transmission(), {probe_mode()});
    const GaussianChannel conj_loss = loss_channel(cell.slice_conjugate_transmission(), {conjugate_mode()});

    GaussianState s = displace(vacuum_state({probe_mode(), conjugate_mode()}), probe_mode(), seed_x, seed_p);
    for (int k = 0; k < cell.n_slices; ++k) {
        s = apply_symplectic(s, gain);
        if (lossy_probe) s = apply_channel(s, probe_loss);
        if (lossy_conj) s = apply_channel(s, conj_loss);
    }
    return s;
}

void AngularGainModel::validate() const {
    require_gain(peak_gain);
    if (!(fwhm_mrad > 0.0) || !std::isfinite(fwhm_mrad)) throw ValidationError("angular fwhm must be positive");
    if (!std::isfinite(center_mrad)) throw ValidationError("angular center must be finite");
    if (!(spot_size_mrad > 0.0) || !std::isfinite(spot_size_mrad)) throw ValidationError("spot size must be positive");
}

double AngularGainModel::sigma_mrad() const { return fwhm_mrad / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

double angular_gain(const AngularGainModel& model, double theta_mrad) {
    model.validate();
    if (!(theta_mrad >= 0.0)) throw ValidationError("angle must be >= 0");
    const double sigma = model.sigma_mrad();
    const double d = theta_mrad - model.center_mrad;
    return 1.0 + (model.peak_gain - 1.0) * std::exp(-d * d / (2.0 * sigma * sigma));
}

std::int64_t estimate_mode_count(const AngularGainModel& model, double theta_min_mrad, double theta_max_mrad) {
    model.validate();
    if (!(theta_min_mrad >= 0.0 && theta_min_mrad < theta_max_mrad) || !std::isfinite(theta_max_mrad))
        throw ValidationError("mode count needs 0 <= theta_min < theta_max");
    const double spot = model.spot_size_mrad;
    const double area_ratio = (theta_max_mrad * theta_max_mrad - theta_min_mrad * theta_min_mrad) / (spot * spot);
    return static_cast<std::int64_t>(std::floor(area_ratio));
}

int order_of_magnitude(std::int64_t count) {
    if (count <= 0) throw ValidationError("order of magnitude needs a positive count");
    return static_cast<int>(std::lround(std::log10(static_cast<double>(count))));
}

}  // namespace twinbeam
