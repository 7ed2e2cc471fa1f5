#pragma once

// Multimode Gaussian states over labeled bosonic modes.
//
// Quadratures are X = (a + a^dagger)/sqrt(2) and P = i(a^dagger - a)/sqrt(2),
// so the vacuum has variance 1/2 per quadrature. Phase-space vectors are
// interleaved: (x_1, p_1, x_2, p_2, ..., x_M, p_M). Every matrix in the
// library is built against this ordering.

#include <concepts>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace twinbeam {

inline constexpr double kVacuumVariance = 0.5;
inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kSymplecticTolerance = 1e-10;
inline constexpr double kPhysicalityTolerance = 1e-9;

enum class Beam { Probe, Conjugate };

const char* to_string(Beam beam);

// Identity of a mode is (beam, pixel); the note is a free-text tag and takes
// no part in comparisons.
struct ModeLabel {
    Beam beam = Beam::Probe;
    std::size_t pixel = 0;
    std::string note;

    friend bool operator==(const ModeLabel& a, const ModeLabel& b) {
        return a.beam == b.beam && a.pixel == b.pixel;
    }
    friend bool operator<(const ModeLabel& a, const ModeLabel& b) {
        return std::pair(a.beam, a.pixel) < std::pair(b.beam, b.pixel);
    }
};

std::string describe(const ModeLabel& mode);

inline ModeLabel probe_mode(std::size_t pixel = 0) { return {Beam::Probe, pixel, {}}; }
inline ModeLabel conjugate_mode(std::size_t pixel = 0) { return {Beam::Conjugate, pixel, {}}; }

struct Quadrature {
    double x = 0.0;
    double p = 0.0;
};

// Linear quadrature observable sum_k (cx_k X_k + cp_k P_k).
struct QuadratureTerm {
    ModeLabel mode;
    double cx = 0.0;
    double cp = 0.0;
};
using QuadratureFunctional = std::vector<QuadratureTerm>;

// Weighted photon-number observable sum_k w_k n_k.
struct PhotonTerm {
    ModeLabel mode;
    double weight = 0.0;
};
using PhotonFunctional = std::vector<PhotonTerm>;

struct PhotonMoments {
    double mean = 0.0;
    double variance = 0.0;
};

struct PhotonStats {
    Eigen::VectorXd means;
    Eigen::MatrixXd covariance;
};

// K-mode symplectic form: block-diagonal [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(std::size_t modes);

// Allowed shortfall of symplectic eigenvalues below 1/2: kPhysicalityTolerance,
// widened in proportion to the Frobenius norm once it exceeds 100 so that
// roundoff in very strongly squeezed states is not mistaken for unphysicality.
double physicality_tolerance(const Eigen::MatrixXd& cov);

// Symplectic eigenvalues of a positive definite covariance matrix, ascending,
// one per mode. Throws ValidationError if cov is not positive definite.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov);

class GaussianState {
public:
    // Validates label uniqueness, dimensions, symmetry and physicality.
    GaussianState(std::vector<ModeLabel> modes, Eigen::VectorXd mean, Eigen::MatrixXd cov);

    const std::vector<ModeLabel>& modes() const { return modes_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }
    std::size_t mode_count() const { return modes_.size(); }
    bool empty() const { return modes_.empty(); }

    bool contains(const ModeLabel& mode) const;
    // Position of the mode in storage order. Throws LookupError.
    std::size_t index_of(const ModeLabel& mode) const;

    std::vector<double> symplectic_eigenvalues() const;

    // Same state, modes stored in the given order (a permutation of modes()).
    GaussianState reordered(const std::vector<ModeLabel>& order) const;

    // Measurement interface shared with block-structured image states.
    double functional_variance(const QuadratureFunctional& functional) const;
    PhotonMoments photon_sum_moments(const PhotonFunctional& functional) const;
    Quadrature mode_mean(const ModeLabel& mode) const;
    // Number of modes carrying the given beam tag.
    std::size_t beam_pixel_count(Beam beam) const;

private:
    void require_nonempty(const char* what) const;

    std::vector<ModeLabel> modes_;
    std::map<ModeLabel, std::size_t> index_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

// Anything that can answer the measurement queries detection needs.
template <class State>
concept MeasurableState = requires(const State& s, const QuadratureFunctional& q,
                                   const PhotonFunctional& n, const ModeLabel& m, Beam b) {
    { s.functional_variance(q) } -> std::convertible_to<double>;
    { s.photon_sum_moments(n) } -> std::same_as<PhotonMoments>;
    { s.mode_mean(m) } -> std::same_as<Quadrature>;
    { s.beam_pixel_count(b) } -> std::convertible_to<std::size_t>;
};

class SymplecticOp {
public:
    // Throws ValidationError unless matrix is 2K x 2K and S^T Omega S = Omega.
    SymplecticOp(Eigen::MatrixXd matrix, std::vector<ModeLabel> target_modes);

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const std::vector<ModeLabel>& target_modes() const { return targets_; }

    static SymplecticOp identity(std::vector<ModeLabel> modes);
    // a -> a exp(-i phi): x -> x cos phi + p sin phi, p -> -x sin phi + p cos phi.
    static SymplecticOp phase_rotation(const ModeLabel& mode, double phi);
    // a1 -> t a1 + r a2, a2 -> -r a1 + t a2 with t = sqrt(transmissivity).
    static SymplecticOp beamsplitter(const ModeLabel& first, const ModeLabel& second, double transmissivity);

private:
    Eigen::MatrixXd matrix_;
    std::vector<ModeLabel> targets_;
};

// Gaussian channel V -> X V X^T + Y, mean -> X mean.
class GaussianChannel {
public:
    // Throws ValidationError unless Y is symmetric PSD and
    // Y + (i/2)(Omega - X Omega X^T) >= 0.
    GaussianChannel(Eigen::MatrixXd x, Eigen::MatrixXd y, std::vector<ModeLabel> target_modes);

    const Eigen::MatrixXd& x() const { return x_; }
    const Eigen::MatrixXd& y() const { return y_; }
    const std::vector<ModeLabel>& target_modes() const { return targets_; }

    // This channel followed by next (same targets, same order).
    GaussianChannel then(const GaussianChannel& next) const;

private:
    Eigen::MatrixXd x_;
    Eigen::MatrixXd y_;
    std::vector<ModeLabel> targets_;
};

GaussianState vacuum_state(std::vector<ModeLabel> modes);
GaussianState displace(const GaussianState& state, const ModeLabel& mode, double x_shift, double p_shift);
GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op);
GaussianState apply_channel(const GaussianState& state, const GaussianChannel& channel);

// Pure loss with power transmission eta on each listed mode.
GaussianChannel loss_channel(double eta, std::vector<ModeLabel> modes);

// c^T cov c for a full-length coefficient vector in storage order.
double quadrature_variance(const GaussianState& state, const Eigen::VectorXd& coeffs);

// Exact photon-number means and covariance for the subset, in subset order.
PhotonStats photon_stats(const GaussianState& state, const std::vector<ModeLabel>& subset);

// {"modes": [...], "mean": [...], "cov": [[...]]} for golden tests.
std::string to_debug_json(const GaussianState& state);

}  // namespace twinbeam
