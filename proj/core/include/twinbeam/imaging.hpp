#pragma once

// Pixel-basis multimode imaging. Each pixel k is one amplifier eigenmode
// pair (probe[k], conjugate[k]); pairs are amplified independently, so the
// output covariance is block-diagonal in 4x4 pixel-pair blocks and is stored
// that way.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "twinbeam/detection.hpp"
#include "twinbeam/fwm_amplifier.hpp"
#include "twinbeam/gaussian_state.hpp"
#include "twinbeam/pgm.hpp"

namespace twinbeam {

inline constexpr std::size_t kDefaultModeBudget = 4096;
inline constexpr double kRegionThreshold = 0.5;

struct PixelGrid {
    std::size_t width = 1;
    std::size_t height = 1;
    double angular_pitch_mrad = 1.0;

    std::size_t size() const { return width * height; }
    void validate() const;
    // Pixel angle from the pump axis when the grid is centred at center_mrad.
    double pixel_angle_mrad(std::size_t pixel, double center_mrad) const;

    friend bool operator==(const PixelGrid& a, const PixelGrid& b) = default;
};

struct Mask {
    PixelGrid grid;
    // Power transmission per pixel, row-major, in [0, 1].
    std::vector<double> transmission;

    void validate() const;
};

struct ThresholdConfig {
    // When set, transmissions become 1 where gray/maxval >= value, else 0.
    std::optional<double> binarize_at;
    double angular_pitch_mrad = 1.0;
};

Mask mask_from_image(const GrayImage& image, const ThresholdConfig& config = {});
Mask load_mask(const std::filesystem::path& path, const ThresholdConfig& config = {});

struct BeamImage {
    PixelGrid grid;
    std::vector<Quadrature> amplitude;

    void validate() const;
};

struct RegionSelector {
    PixelGrid grid;
    std::vector<bool> included;

    void validate() const;
    std::size_t count() const;

    static RegionSelector all(const PixelGrid& grid);
    RegionSelector complement() const;
};

// Boolean region from a PGM: pixel included where gray/maxval >= 0.5.
RegionSelector region_from_image(const GrayImage& image, double angular_pitch_mrad = 1.0);
RegionSelector load_region(const std::filesystem::path& path, double angular_pitch_mrad = 1.0);

// Intensity masking of a uniform real seed: x = sqrt(2) alpha sqrt(T), p = 0.
BeamImage masked_seed(const PixelGrid& grid, const Mask& mask, double alpha);

// Uniform gain, or per-pixel gain from the angular profile.
using GainMap = std::variant<double, AngularGainModel>;

std::vector<double> pixel_gains(const PixelGrid& grid, const GainMap& gain);

class ImageState {
public:
    // Blocks must be two-mode states labeled (probe[k], conjugate[k]) in that order.
    ImageState(PixelGrid grid, std::vector<GaussianState> blocks);

    const PixelGrid& grid() const { return grid_; }
    std::size_t pixel_count() const { return blocks_.size(); }
    const GaussianState& block(std::size_t pixel) const;
    const std::vector<GaussianState>& blocks() const { return blocks_; }

    // Applies fn to each pixel-pair block; fn must keep the block's labels.
    ImageState map_blocks(const std::function<GaussianState(const GaussianState&)>& fn) const;

    // Dense state over all 2 W H modes, ordered probe[0], conj[0], probe[1], ...
    GaussianState to_dense() const;

    // Mean photon number per pixel of one beam.
    std::vector<double> mean_photons(Beam beam) const;

    double functional_variance(const QuadratureFunctional& functional) const;
    PhotonMoments photon_sum_moments(const PhotonFunctional& functional) const;
    Quadrature mode_mean(const ModeLabel& mode) const;
    std::size_t beam_pixel_count(Beam beam) const;

private:
    std::size_t pixel_of(const ModeLabel& mode) const;

    PixelGrid grid_;
    std::vector<GaussianState> blocks_;
};

static_assert(MeasurableState<ImageState>);
static_assert(MeasurableState<GaussianState>);

// Per pixel: displace probe by the seed amplitude, then apply tms(G_k) to
// (probe[k], conjugate[k]). Throws ResourceError past the mode budget.
ImageState amplify_image(const BeamImage& seed, const GainMap& gain, std::size_t mode_budget = kDefaultModeBudget);

// 0/1 photon-number summation weights over the grid (excluded pixels are discarded).
std::vector<double> region_weights(const RegionSelector& selector);
std::vector<ModeLabel> region_modes(const RegionSelector& selector, Beam beam);

double subregion_intensity_difference_db(const ImageState& state, const RegionSelector& probe_region,
                                         const RegionSelector& conj_region);

// LO weights proportional to sqrt(T), unit L2 norm.
HomodyneSpec lo_profile_from_mask(const Mask& mask, double lo_phase, double efficiency);

// gray = round(65535 I / I_max); all-zero intensity gives an all-zero image.
GrayImage intensity_image(const PixelGrid& grid, const std::vector<double>& intensity);

}  // namespace twinbeam
