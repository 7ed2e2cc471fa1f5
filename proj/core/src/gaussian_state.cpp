#include "twinbeam/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "twinbeam/errors.hpp"

namespace twinbeam {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::map<ModeLabel, std::size_t> build_index(const std::vector<ModeLabel>& modes) {
    std::map<ModeLabel, std::size_t> index;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        auto [it, inserted] = index.emplace(modes[i], i);
        if (!inserted) throw ValidationError("duplicate mode label " + describe(modes[i]));
    }
    return index;
}

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Phase-space row/column indices of the given modes, in order.
std::vector<Index> phase_space_indices(const GaussianState& state, const std::vector<ModeLabel>& targets) {
    std::vector<Index> idx;
    idx.reserve(2 * targets.size());
    for (const auto& mode : targets) {
        const auto k = static_cast<Index>(state.index_of(mode));
        idx.push_back(2 * k);
        idx.push_back(2 * k + 1);
    }
    return idx;
}

void require_unique(const std::vector<ModeLabel>& modes) { build_index(modes); }

}  // namespace

const char* to_string(Beam beam) { return beam == Beam::Probe ? "probe" : "conjugate"; }

std::string describe(const ModeLabel& mode) {
    std::string out = std::string(to_string(mode.beam)) + "[" + std::to_string(mode.pixel) + "]";
    if (!mode.note.empty()) out += " (" + mode.note + ")";
    return out;
}

MatrixXd symplectic_form(std::size_t modes) {
    const auto n = static_cast<Index>(modes);
    MatrixXd omega = MatrixXd::Zero(2 * n, 2 * n);
    for (Index k = 0; k < n; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

double physicality_tolerance(const MatrixXd& cov) {
    return kPhysicalityTolerance * std::max(1.0, cov.norm() / 100.0);
}

std::vector<double> symplectic_eigenvalues(const MatrixXd& cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0)
        throw ValidationError("covariance must be square with even dimension");
    if (cov.rows() == 0) return {};

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(symmetrized(cov));
    if (eig.info() != Eigen::Success) throw ValidationError("eigen decomposition failed");
    if (eig.eigenvalues().minCoeff() <= 0.0) throw ValidationError("covariance is not positive definite");

    const MatrixXd root =
        eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
    const MatrixXd a = root * symplectic_form(static_cast<std::size_t>(cov.rows() / 2)) * root;
    // a is antisymmetric, so i a is Hermitian with eigenvalues -nu_k and +nu_k.
    // Diagonalizing it directly keeps the error proportional to |cov| rather
    // than |cov|^2 as squaring a would.
    const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * (0.5 * (a - a.transpose())).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> herm(h, Eigen::EigenvaluesOnly);
    const VectorXd& ev = herm.eigenvalues();
    const Index m = ev.size() / 2;
    std::vector<double> nu;
    nu.reserve(static_cast<std::size_t>(m));
    for (Index k = 0; k < m; ++k) nu.push_back(0.5 * (ev(m + k) - ev(m - 1 - k)));
    return nu;
}

// ---------------------------------------------------------------------------
// GaussianState

GaussianState::GaussianState(std::vector<ModeLabel> modes, VectorXd mean, MatrixXd cov)
    : modes_(std::move(modes)), index_(build_index(modes_)), mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto dim = static_cast<Index>(2 * modes_.size());
    if (mean_.size() != dim) throw ValidationError("mean vector length does not match 2 x mode count");
    if (cov_.rows() != dim || cov_.cols() != dim)
        throw ValidationError("covariance shape does not match 2 x mode count");
    if (!mean_.allFinite() || !cov_.allFinite()) throw ValidationError("state contains non-finite values");
    if (max_abs(cov_ - cov_.transpose()) > kSymmetryTolerance) throw ValidationError("covariance is not symmetric");
    if (dim == 0) return;

    std::vector<double> nu;
    try {
        nu = twinbeam::symplectic_eigenvalues(cov_);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("unphysical state: ") + e.what());
    }
    if (nu.front() < kVacuumVariance - physicality_tolerance(cov_)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "unphysical state: symplectic eigenvalue 1/2 - %.3g (covariance norm %.3g)",
                      kVacuumVariance - nu.front(), cov_.norm());
        throw ValidationError(buf);
    }
}

bool GaussianState::contains(const ModeLabel& mode) const { return index_.count(mode) != 0; }

std::size_t GaussianState::index_of(const ModeLabel& mode) const {
    auto it = index_.find(mode);
    if (it == index_.end()) throw LookupError("mode " + describe(mode) + " not present in state");
    return it->second;
}

std::vector<double> GaussianState::symplectic_eigenvalues() const { return twinbeam::symplectic_eigenvalues(cov_); }

GaussianState GaussianState::reordered(const std::vector<ModeLabel>& order) const {
    if (order.size() != modes_.size()) throw ValidationError("reorder must list every mode exactly once");
    require_unique(order);
    std::vector<Index> idx = phase_space_indices(*this, order);
    std::vector<ModeLabel> labels;
    labels.reserve(order.size());
    for (const auto& m : order) labels.push_back(modes_[index_of(m)]);
    return GaussianState(std::move(labels), mean_(idx), cov_(idx, idx));
}

void GaussianState::require_nonempty(const char* what) const {
    if (modes_.empty()) throw ValidationError(std::string(what) + " on an empty state");
}

double GaussianState::functional_variance(const QuadratureFunctional& functional) const {
    require_nonempty("functional_variance");
    VectorXd c = VectorXd::Zero(mean_.size());
    for (const auto& term : functional) {
        const auto k = static_cast<Index>(index_of(term.mode));
        c(2 * k) += term.cx;
        c(2 * k + 1) += term.cp;
    }
    return c.dot(cov_ * c);
}

PhotonMoments GaussianState::photon_sum_moments(const PhotonFunctional& functional) const {
    require_nonempty("photon_sum_moments");
    std::map<ModeLabel, double> weights;
    for (const auto& term : functional) {
        index_of(term.mode);
        weights[term.mode] += term.weight;
    }
    std::vector<ModeLabel> subset;
    VectorXd w(static_cast<Index>(weights.size()));
    Index i = 0;
    for (const auto& [mode, weight] : weights) {
        subset.push_back(mode);
        w(i++) = weight;
    }
    const PhotonStats stats = photon_stats(*this, subset);
    return {w.dot(stats.means), w.dot(stats.covariance * w)};
}

Quadrature GaussianState::mode_mean(const ModeLabel& mode) const {
    const auto k = static_cast<Index>(index_of(mode));
    return {mean_(2 * k), mean_(2 * k + 1)};
}

std::size_t GaussianState::beam_pixel_count(Beam beam) const {
    return static_cast<std::size_t>(
        std::count_if(modes_.begin(), modes_.end(), [beam](const ModeLabel& m) { return m.beam == beam; }));
}

// ---------------------------------------------------------------------------
// Operators

SymplecticOp::SymplecticOp(MatrixXd matrix, std::vector<ModeLabel> target_modes)
    : matrix_(std::move(matrix)), targets_(std::move(target_modes)) {
    require_unique(targets_);
    const auto dim = static_cast<Index>(2 * targets_.size());
    if (matrix_.rows() != dim || matrix_.cols() != dim)
        throw ValidationError("symplectic matrix shape does not match target modes");
    if (!matrix_.allFinite()) throw ValidationError("symplectic matrix contains non-finite values");
    const MatrixXd omega = symplectic_form(targets_.size());
    const double defect = max_abs(matrix_.transpose() * omega * matrix_ - omega);
    if (defect >= kSymplecticTolerance)
        throw ValidationError("matrix is not symplectic (defect " + std::to_string(defect) + ")");
}

SymplecticOp SymplecticOp::identity(std::vector<ModeLabel> modes) {
    const auto dim = static_cast<Index>(2 * modes.size());
    return SymplecticOp(MatrixXd::Identity(dim, dim), std::move(modes));
}

SymplecticOp SymplecticOp::phase_rotation(const ModeLabel& mode, double phi) {
    MatrixXd r(2, 2);
    r << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
    return SymplecticOp(std::move(r), {mode});
}

SymplecticOp SymplecticOp::beamsplitter(const ModeLabel& first, const ModeLabel& second, double transmissivity) {
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
        throw ValidationError("beamsplitter transmissivity must lie in [0, 1]");
    const double t = std::sqrt(transmissivity);
    const double r = std::sqrt(1.0 - transmissivity);
    MatrixXd s = MatrixXd::Zero(4, 4);
    s.block<2, 2>(0, 0) = t * Eigen::Matrix2d::Identity();
    s.block<2, 2>(0, 2) = r * Eigen::Matrix2d::Identity();
    s.block<2, 2>(2, 0) = -r * Eigen::Matrix2d::Identity();
    s.block<2, 2>(2, 2) = t * Eigen::Matrix2d::Identity();
    return SymplecticOp(std::move(s), {first, second});
}

GaussianChannel::GaussianChannel(MatrixXd x, MatrixXd y, std::vector<ModeLabel> target_modes)
    : x_(std::move(x)), y_(std::move(y)), targets_(std::move(target_modes)) {
    require_unique(targets_);
    const auto dim = static_cast<Index>(2 * targets_.size());
    if (x_.rows() != dim || x_.cols() != dim || y_.rows() != dim || y_.cols() != dim)
        throw ValidationError("channel matrix shape does not match target modes");
    if (!x_.allFinite() || !y_.allFinite()) throw ValidationError("channel contains non-finite values");
    if (max_abs(y_ - y_.transpose()) > kSymmetryTolerance) throw ValidationError("channel noise Y is not symmetric");
    if (dim == 0) return;

    Eigen::SelfAdjointEigenSolver<MatrixXd> ypsd(symmetrized(y_), Eigen::EigenvaluesOnly);
    if (ypsd.eigenvalues().minCoeff() < -kPhysicalityTolerance)
        throw ValidationError("channel noise Y is not positive semidefinite");

    const MatrixXd omega = symplectic_form(targets_.size());
    const Eigen::MatrixXcd cp = symmetrized(y_).cast<std::complex<double>>() +
                                std::complex<double>(0.0, 0.5) * (omega - x_ * omega * x_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> cpeig(cp, Eigen::EigenvaluesOnly);
    if (cpeig.eigenvalues().minCoeff() < -kPhysicalityTolerance)
        throw ValidationError("channel violates complete positivity");
}

GaussianChannel GaussianChannel::then(const GaussianChannel& next) const {
    if (next.targets_ != targets_) throw ValidationError("composed channels must act on the same modes in order");
    return GaussianChannel(next.x_ * x_, next.x_ * y_ * next.x_.transpose() + next.y_, targets_);
}

// ---------------------------------------------------------------------------
// Free operations

GaussianState vacuum_state(std::vector<ModeLabel> modes) {
    const auto dim = static_cast<Index>(2 * modes.size());
    return GaussianState(std::move(modes), VectorXd::Zero(dim), kVacuumVariance * MatrixXd::Identity(dim, dim));
}

GaussianState displace(const GaussianState& state, const ModeLabel& mode, double x_shift, double p_shift) {
    const auto k = static_cast<Index>(state.index_of(mode));
    VectorXd mean = state.mean();
    mean(2 * k) += x_shift;
    mean(2 * k + 1) += p_shift;
    return GaussianState(state.modes(), std::move(mean), state.cov());
}

GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op) {
    const std::vector<Index> idx = phase_space_indices(state, op.target_modes());
    const MatrixXd& s = op.matrix();

    VectorXd mean = state.mean();
    mean(idx) = (s * state.mean()(idx)).eval();

    MatrixXd cov = state.cov();
    cov(idx, Eigen::all) = (s * cov(idx, Eigen::all)).eval();
    cov(Eigen::all, idx) = (cov(Eigen::all, idx) * s.transpose()).eval();
    return GaussianState(state.modes(), std::move(mean), symmetrized(cov));
}

GaussianState apply_channel(const GaussianState& state, const GaussianChannel& channel) {
    const std::vector<Index> idx = phase_space_indices(state, channel.target_modes());
    const MatrixXd& x = channel.x();

    VectorXd mean = state.mean();
    mean(idx) = (x * state.mean()(idx)).eval();

    MatrixXd cov = state.cov();
    cov(idx, Eigen::all) = (x * cov(idx, Eigen::all)).eval();
    cov(Eigen::all, idx) = (cov(Eigen::all, idx) * x.transpose()).eval();
    cov(idx, idx) += channel.y();
    return GaussianState(state.modes(), std::move(mean), symmetrized(cov));
}

GaussianChannel loss_channel(double eta, std::vector<ModeLabel> modes) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("loss transmission must lie in [0, 1]");
    if (modes.empty()) throw ValidationError("loss channel needs at least one mode");
    const auto dim = static_cast<Index>(2 * modes.size());
    return GaussianChannel(std::sqrt(eta) * MatrixXd::Identity(dim, dim),
                           (1.0 - eta) * kVacuumVariance * MatrixXd::Identity(dim, dim), std::move(modes));
}

double quadrature_variance(const GaussianState& state, const VectorXd& coeffs) {
    if (state.empty()) throw ValidationError("quadrature_variance on an empty state");
    if (coeffs.size() != state.mean().size()) throw ValidationError("coefficient vector length must be 2 x mode count");
    return coeffs.dot(state.cov() * coeffs);
}

PhotonStats photon_stats(const GaussianState& state, const std::vector<ModeLabel>& subset) {
    if (state.empty()) throw ValidationError("photon_stats on an empty state");
    const auto n = static_cast<Index>(subset.size());
    std::vector<Index> base(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) base[i] = 2 * static_cast<Index>(state.index_of(subset[i]));

    const VectorXd& m = state.mean();
    const MatrixXd& v = state.cov();
    PhotonStats out{VectorXd(n), MatrixXd(n, n)};
    for (Index i = 0; i < n; ++i) {
        const Index a = base[static_cast<std::size_t>(i)];
        out.means(i) = 0.5 * (v(a, a) + v(a + 1, a + 1) + m(a) * m(a) + m(a + 1) * m(a + 1) - 1.0);
    }
    // Weyl-ordered Isserlis: Cov(n_i, n_j) = |V_ij|_F^2 / 2 + m_i^T V_ij m_j - delta_ij / 4.
    for (Index i = 0; i < n; ++i) {
        const Index a = base[static_cast<std::size_t>(i)];
        for (Index j = i; j < n; ++j) {
            const Index b = base[static_cast<std::size_t>(j)];
            const Eigen::Matrix2d block = v.block<2, 2>(a, b);
            const Eigen::Vector2d mi(m(a), m(a + 1));
            const Eigen::Vector2d mj(m(b), m(b + 1));
            double c = 0.5 * block.squaredNorm() + mi.dot(block * mj);
            if (i == j) c -= 0.25;
            out.covariance(i, j) = c;
            out.covariance(j, i) = c;
        }
    }
    return out;
}

std::string to_debug_json(const GaussianState& state) {
    nlohmann::ordered_json j;
    j["modes"] = nlohmann::ordered_json::array();
    for (const auto& mode : state.modes()) {
        j["modes"].push_back({{"beam", to_string(mode.beam)}, {"pixel", mode.pixel}, {"note", mode.note}});
    }
    j["mean"] = std::vector<double>(state.mean().data(), state.mean().data() + state.mean().size());
    auto cov = nlohmann::ordered_json::array();
    for (Index r = 0; r < state.cov().rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(state.cov().cols()));
        for (Index c = 0; c < state.cov().cols(); ++c) row[static_cast<std::size_t>(c)] = state.cov()(r, c);
        cov.push_back(row);
    }
    j["cov"] = std::move(cov);
    return j.dump(2) + "\n";
}

}  // namespace twinbeam
