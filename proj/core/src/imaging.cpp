#include "twinbeam/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "twinbeam/errors.hpp"

namespace twinbeam {

void PixelGrid::validate() const {
    if (width == 0 || height == 0) throw ValidationError("pixel grid needs positive width and height");
    if (!(angular_pitch_mrad > 0.0) || !std::isfinite(angular_pitch_mrad))
        throw ValidationError("angular pitch must be positive");
}

double PixelGrid::pixel_angle_mrad(std::size_t pixel, double center_mrad) const {
    if (pixel >= size()) throw LookupError("pixel " + std::to_string(pixel) + " outside grid");
    const double x = static_cast<double>(pixel % width) - 0.5 * static_cast<double>(width - 1);
    const double y = static_cast<double>(pixel / width) - 0.5 * static_cast<double>(height - 1);
    return std::hypot(center_mrad + x * angular_pitch_mrad, y * angular_pitch_mrad);
}

void Mask::validate() const {
    grid.validate();
    if (transmission.size() != grid.size()) throw ValidationError("mask size does not match its grid");
    for (double t : transmission) {
        if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("mask transmission must lie in [0, 1]");
    }
}

Mask mask_from_image(const GrayImage& image, const ThresholdConfig& config) {
    Mask mask{{image.width, image.height, config.angular_pitch_mrad}, {}};
    mask.transmission.reserve(image.pixels.size());
    for (auto gray : image.pixels) {
        const double t = static_cast<double>(gray) / static_cast<double>(image.maxval);
        if (config.binarize_at) {
            mask.transmission.push_back(t >= *config.binarize_at ? 1.0 : 0.0);
        } else {
            mask.transmission.push_back(t);
        }
    }
    mask.validate();
    return mask;
}

Mask load_mask(const std::filesystem::path& path, const ThresholdConfig& config) {
    return mask_from_image(read_pgm(path), config);
}

void BeamImage::validate() const {
    grid.validate();
    if (amplitude.size() != grid.size()) throw ValidationError("beam image size does not match its grid");
    for (const auto& q : amplitude) {
        if (!std::isfinite(q.x) || !std::isfinite(q.p)) throw ValidationError("beam image has non-finite amplitude");
    }
}

void RegionSelector::validate() const {
    grid.validate();
    if (included.size() != grid.size()) throw ValidationError("region size does not match its grid");
}

std::size_t RegionSelector::count() const {
    return static_cast<std::size_t>(std::count(included.begin(), included.end(), true));
}

RegionSelector RegionSelector::all(const PixelGrid& grid) { return {grid, std::vector<bool>(grid.size(), true)}; }

RegionSelector RegionSelector::complement() const {
    RegionSelector out = *this;
    out.included.flip();
    return out;
}

RegionSelector region_from_image(const GrayImage& image, double angular_pitch_mrad) {
    RegionSelector r{{image.width, image.height, angular_pitch_mrad}, {}};
    r.included.reserve(image.pixels.size());
    for (auto gray : image.pixels)
        r.included.push_back(static_cast<double>(gray) / static_cast<double>(image.maxval) >= kRegionThreshold);
    r.validate();
    return r;
}

RegionSelector load_region(const std::filesystem::path& path, double angular_pitch_mrad) {
    return region_from_image(read_pgm(path), angular_pitch_mrad);
}

BeamImage masked_seed(const PixelGrid& grid, const Mask& mask, double alpha) {
    grid.validate();
    mask.validate();
    if (!(mask.grid == grid)) throw ValidationError("mask grid does not match seed grid");
    if (!std::isfinite(alpha)) throw ValidationError("seed amplitude must be finite");
    BeamImage img{grid, std::vector<Quadrature>(grid.size())};
    for (std::size_t k = 0; k < grid.size(); ++k)
        img.amplitude[k] = {std::sqrt(2.0) * alpha * std::sqrt(mask.transmission[k]), 0.0};
    return img;
}

std::vector<double> pixel_gains(const PixelGrid& grid, const GainMap& gain) {
    grid.validate();
    std::vector<double> out(grid.size());
    if (const double* uniform = std::get_if<double>(&gain)) {
        if (!(*uniform >= 1.0) || !std::isfinite(*uniform)) throw ValidationError("gain must be finite and >= 1");
        std::fill(out.begin(), out.end(), *uniform);
    } else {
        const auto& model = std::get<AngularGainModel>(gain);
        model.validate();
        for (std::size_t k = 0; k < grid.size(); ++k)
            out[k] = angular_gain(model, grid.pixel_angle_mrad(k, model.center_mrad));
    }
    return out;
}

// ---------------------------------------------------------------------------
// ImageState

ImageState::ImageState(PixelGrid grid, std::vector<GaussianState> blocks) : grid_(grid), blocks_(std::move(blocks)) {
    grid_.validate();
    if (blocks_.size() != grid_.size()) throw ValidationError("image state needs one block per pixel");
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const auto& modes = blocks_[k].modes();
        if (modes.size() != 2 || !(modes[0] == probe_mode(k)) || !(modes[1] == conjugate_mode(k)))
            throw ValidationError("block " + std::to_string(k) + " must hold (probe[k], conjugate[k])");
    }
}

const GaussianState& ImageState::block(std::size_t pixel) const {
    if (pixel >= blocks_.size()) throw LookupError("pixel " + std::to_string(pixel) + " outside grid");
    return blocks_[pixel];
}

ImageState ImageState::map_blocks(const std::function<GaussianState(const GaussianState&)>& fn) const {
    std::vector<GaussianState> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(fn(b));
    return ImageState(grid_, std::move(out));
}

GaussianState ImageState::to_dense() const {
    const auto n = static_cast<Eigen::Index>(blocks_.size());
    std::vector<ModeLabel> modes;
    modes.reserve(2 * blocks_.size());
    Eigen::VectorXd mean(4 * n);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& b = blocks_[static_cast<std::size_t>(k)];
        modes.push_back(b.modes()[0]);
        modes.push_back(b.modes()[1]);
        mean.segment<4>(4 * k) = b.mean();
        cov.block<4, 4>(4 * k, 4 * k) = b.cov();
    }
    return GaussianState(std::move(modes), std::move(mean), std::move(cov));
}

std::vector<double> ImageState::mean_photons(Beam beam) const {
    std::vector<double> out(blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k)
        out[k] = blocks_[k].photon_sum_moments({{ModeLabel{beam, k, {}}, 1.0}}).mean;
    return out;
}

std::size_t ImageState::pixel_of(const ModeLabel& mode) const {
    if (mode.pixel >= blocks_.size()) throw LookupError("mode " + describe(mode) + " not present in image state");
    return mode.pixel;
}

double ImageState::functional_variance(const QuadratureFunctional& functional) const {
    std::map<std::size_t, Eigen::Vector4d> per_pixel;
    for (const auto& term : functional) {
        auto [it, _] = per_pixel.try_emplace(pixel_of(term.mode), Eigen::Vector4d::Zero());
        const int off = term.mode.beam == Beam::Probe ? 0 : 2;
        it->second(off) += term.cx;
        it->second(off + 1) += term.cp;
    }
    double total = 0.0;
    for (const auto& [k, c] : per_pixel) total += c.dot(blocks_[k].cov() * c);
    return total;
}

PhotonMoments ImageState::photon_sum_moments(const PhotonFunctional& functional) const {
    std::map<std::size_t, Eigen::Vector2d> per_pixel;
    for (const auto& term : functional) {
        auto [it, _] = per_pixel.try_emplace(pixel_of(term.mode), Eigen::Vector2d::Zero());
        it->second(term.mode.beam == Beam::Probe ? 0 : 1) += term.weight;
    }
    PhotonMoments total;
    for (const auto& [k, w] : per_pixel) {
        const PhotonStats s = photon_stats(blocks_[k], blocks_[k].modes());
        total.mean += w.dot(s.means);
        total.variance += w.dot(s.covariance * w);
    }
    return total;
}

Quadrature ImageState::mode_mean(const ModeLabel& mode) const { return blocks_[pixel_of(mode)].mode_mean(mode); }

std::size_t ImageState::beam_pixel_count(Beam) const { return blocks_.size(); }

ImageState amplify_image(const BeamImage& seed, const GainMap& gain, std::size_t mode_budget) {
    seed.validate();
    if (seed.grid.size() > mode_budget) {
        throw ResourceError("image has " + std::to_string(seed.grid.size()) + " pixels, over the mode budget of " +
                            std::to_string(mode_budget));
    }
    const std::vector<double> gains = pixel_gains(seed.grid, gain);
    std::vector<GaussianState> blocks;
    blocks.reserve(seed.grid.size());
    for (std::size_t k = 0; k < seed.grid.size(); ++k) {
        GaussianState s = vacuum_state({probe_mode(k), conjugate_mode(k)});
        s = displace(s, probe_mode(k), seed.amplitude[k].x, seed.amplitude[k].p);
        blocks.push_back(apply_symplectic(s, tms_symplectic({gains[k], probe_mode(k), conjugate_mode(k)})));
    }
    return ImageState(seed.grid, std::move(blocks));
}

std::vector<double> region_weights(const RegionSelector& selector) {
    selector.validate();
    if (selector.count() == 0) throw ValidationError("region selects no pixels");
    std::vector<double> w(selector.included.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = selector.included[k] ? 1.0 : 0.0;
    return w;
}

std::vector<ModeLabel> region_modes(const RegionSelector& selector, Beam beam) {
    const std::vector<double> w = region_weights(selector);
    std::vector<ModeLabel> modes;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] != 0.0) modes.push_back({beam, k, {}});
    }
    return modes;
}

double subregion_intensity_difference_db(const ImageState& state, const RegionSelector& probe_region,
                                         const RegionSelector& conj_region) {
    if (!(probe_region.grid == state.grid()) || !(conj_region.grid == state.grid()))
        throw ValidationError("region grid does not match image state");
    return intensity_difference_db(state, region_modes(probe_region, Beam::Probe),
                                   region_modes(conj_region, Beam::Conjugate));
}

HomodyneSpec lo_profile_from_mask(const Mask& mask, double lo_phase, double efficiency) {
    mask.validate();
    std::vector<double> w(mask.transmission.size());
    double norm2 = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = std::sqrt(mask.transmission[k]);
        norm2 += mask.transmission[k];
    }
    if (!(norm2 > 0.0)) throw ValidationError("LO mask has no transmitting pixels");
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : w) x *= inv;
    HomodyneSpec spec{std::move(w), lo_phase, efficiency};
    spec.validate();
    return spec;
}

GrayImage intensity_image(const PixelGrid& grid, const std::vector<double>& intensity) {
    grid.validate();
    if (intensity.size() != grid.size()) throw ValidationError("intensity map size does not match grid");
    GrayImage img{grid.width, grid.height, 65535, std::vector<std::uint32_t>(grid.size(), 0)};
    double peak = 0.0;
    for (double v : intensity) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("intensity must be finite and non-negative");
        peak = std::max(peak, v);
    }
    if (peak > 0.0) {
        for (std::size_t k = 0; k < intensity.size(); ++k)
            img.pixels[k] = static_cast<std::uint32_t>(std::lround(65535.0 * intensity[k] / peak));
    }
    return img;
}

}  // namespace twinbeam
