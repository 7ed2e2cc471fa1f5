#pragma once

// Four-wave-mixing amplifier models: the two-mode squeezer, continuous
// evolution, a sliced gain/loss cell and the angular gain profile.
//
// Convention: a1 -> sqrt(G) a1 + sqrt(G-1) a2^dagger, which squeezes the
// joint quadratures X_- = X1 - X2 and P_+ = P1 + P2 by e^{-r}, with
// sqrt(G) = cosh r.

#include <cmath>
#include <cstdint>

#include "twinbeam/gaussian_state.hpp"

namespace twinbeam {

struct TwoModeSqueezerSpec {
    double gain = 1.0;
    ModeLabel probe = probe_mode();
    ModeLabel conjugate = conjugate_mode();
};

// r = arccosh(sqrt(G)). Throws ValidationError for G < 1.
double squeeze_parameter(double gain);
// G = cosh^2(r).
double gain_from_squeeze(double r);
// Gain whose lossless two-mode squeezed vacuum has joint variance
// Var(X_-) = variance (vacuum = 1). Requires 0 < variance <= 1.
double gain_for_joint_variance(double variance);

SymplecticOp tms_symplectic(const TwoModeSqueezerSpec& spec);

// Integrates da1/dt = kappa a2^dagger, da2/dt = kappa a1^dagger for time t.
GaussianState evolve_fwm(const GaussianState& state, double kappa, double t, const ModeLabel& probe,
                         const ModeLabel& conjugate);

// Probe seeded with a coherent state of mean quadratures (seed_x, seed_p),
// conjugate in vacuum, then amplified with gain G. Modes probe[0], conjugate[0].
GaussianState seeded_amplifier_output(double gain, double seed_x, double seed_p);

// Seed amplitude for a coherent state with alpha^2 mean photons (real alpha).
inline double seed_x_for_photons(double alpha_sq) { return std::sqrt(2.0 * alpha_sq); }

struct CellModel {
    int n_slices = 64;
    double total_gain = 1.0;
    double probe_transmission = 0.8;
    double conjugate_transmission = 1.0;

    void validate() const;
    // cosh^2(r / n_slices) with cosh^2 r = total_gain.
    double slice_gain() const;
    double slice_probe_transmission() const;
    double slice_conjugate_transmission() const;
};

// Alternates per-slice squeezing and per-mode loss through the cell.
GaussianState distributed_cell_output(const CellModel& cell, double seed_x, double seed_p);

struct AngularGainModel {
    double peak_gain = 1.0;
    double center_mrad = 7.0;
    double fwhm_mrad = 8.0;
    double spot_size_mrad = 1.0;

    void validate() const;
    double sigma_mrad() const;
};

// G(theta) = 1 + (G0 - 1) exp(-(theta - theta0)^2 / (2 sigma^2)).
double angular_gain(const AngularGainModel& model, double theta_mrad);

// floor((theta_max^2 - theta_min^2) / spot^2): spot-sized cells in the
// annular acceptance cone. An order-of-magnitude estimate.
std::int64_t estimate_mode_count(const AngularGainModel& model, double theta_min_mrad, double theta_max_mrad);

// Nearest power of ten exponent, e.g. 96 -> 2.
int order_of_magnitude(std::int64_t count);

}  // namespace twinbeam
