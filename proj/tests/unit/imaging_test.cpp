#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "twinbeam/entanglement.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/imaging.hpp"

using namespace twinbeam;

namespace {

const std::string kMasks = std::string(TWINBEAM_DATA_DIR) + "/masks/";

Mask uniform_mask(std::size_t w, std::size_t h, double t = 1.0) {
    return {{w, h, 1.0}, std::vector<double>(w * h, t)};
}

ImageState vacuum_image(const PixelGrid& grid, const GainMap& gain) {
    return amplify_image(BeamImage{grid, std::vector<Quadrature>(grid.size())}, gain);
}

}  // namespace

TEST(LoadMask, AllWhiteAndAllBlack) {
    const auto white = mask_from_image(parse_pgm("P2\n2 2\n7\n7 7 7 7\n"));
    for (double t : white.transmission) EXPECT_DOUBLE_EQ(t, 1.0);
    const auto black = mask_from_image(parse_pgm("P2\n2 2\n7\n0 0 0 0\n"));
    for (double t : black.transmission) EXPECT_DOUBLE_EQ(t, 0.0);
}

TEST(LoadMask, GrayLevelsRescaleAndBinarize) {
    const auto img = parse_pgm("P2\n3 1\n4\n1 2 3\n");
    const auto gray = mask_from_image(img);
    EXPECT_DOUBLE_EQ(gray.transmission[0], 0.25);
    ThresholdConfig cfg;
    cfg.binarize_at = 0.5;
    const auto bin = mask_from_image(img, cfg);
    EXPECT_EQ(bin.transmission, (std::vector<double>{0.0, 1.0, 1.0}));
}

TEST(LoadMask, TGlyphFixtureMatchesKnownPixels) {
    const Mask m = load_mask(kMasks + "t_glyph.pgm");
    ASSERT_EQ(m.grid.width, 16u);
    ASSERT_EQ(m.grid.height, 16u);
    for (std::size_t y = 0; y < 16; ++y) {
        for (std::size_t x = 0; x < 16; ++x) {
            const bool lit = (y == 2 && x >= 3 && x <= 11) || (x == 7 && y >= 3 && y <= 10);
            EXPECT_EQ(m.transmission[y * 16 + x], lit ? 1.0 : 0.0) << x << "," << y;
        }
    }
}

TEST(LoadMask, MalformedFileIsParseError) {
    EXPECT_THROW(mask_from_image(parse_pgm("P2\n0 0\n255\n")), ParseError);
    EXPECT_THROW(load_mask(kMasks + "does_not_exist.pgm"), IoError);
}

TEST(MaskedSeed, AmplitudeFollowsSquareRootOfTransmission) {
    Mask m = uniform_mask(3, 1);
    m.transmission = {1.0, 0.0, 0.25};
    const auto seed = masked_seed(m.grid, m, 1.0);
    EXPECT_DOUBLE_EQ(seed.amplitude[0].x, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(seed.amplitude[1].x, 0.0);
    EXPECT_DOUBLE_EQ(seed.amplitude[2].x, std::sqrt(2.0) * 0.5);
    for (const auto& q : seed.amplitude) EXPECT_DOUBLE_EQ(q.p, 0.0);
}

TEST(MaskedSeed, GridMismatchRejected) {
    const Mask m = uniform_mask(3, 1);
    EXPECT_THROW(masked_seed(PixelGrid{1, 3, 1.0}, m, 1.0), ValidationError);
}

TEST(AmplifyImage, SinglePixelReducesToSeededAmplifier) {
    const Mask m = uniform_mask(1, 1);
    const auto state = amplify_image(masked_seed(m.grid, m, 5.0), 2.0);
    const auto ref = seeded_amplifier_output(2.0, std::sqrt(2.0) * 5.0, 0.0);
    EXPECT_TRUE(state.block(0).cov().isApprox(ref.cov(), 1e-14));
    EXPECT_TRUE(state.block(0).mean().isApprox(ref.mean(), 1e-14));
}

TEST(AmplifyImage, SeedChangesMeanOnly) {
    Mask m = uniform_mask(2, 1);
    m.transmission = {1.0, 0.0};
    const auto state = amplify_image(masked_seed(m.grid, m, 10.0), 2.0);
    EXPECT_TRUE(state.block(0).cov().isApprox(state.block(1).cov(), 1e-14));
    EXPECT_GT(state.block(0).mean().norm(), 1.0);
    EXPECT_DOUBLE_EQ(state.block(1).mean().norm(), 0.0);
    const auto dense = state.to_dense();
    EXPECT_EQ(dense.mode_count(), 4u);
    EXPECT_TRUE(dense.cov().block(0, 4, 4, 4).isZero(0.0));
}

TEST(AmplifyImage, AngularGainFallsOffAwayFromCenter) {
    const PixelGrid grid{9, 1, 1.0};
    const AngularGainModel model{3.0, 7.0, 8.0, 1.0};
    const auto gains = pixel_gains(grid, model);
    EXPECT_DOUBLE_EQ(gains[4], 3.0);
    EXPECT_LT(gains[0], gains[2]);
    EXPECT_LT(gains[8], gains[6]);
    EXPECT_NEAR(gains[0], angular_gain(model, 3.0), 1e-15);
    const auto state = vacuum_image(grid, model);
    EXPECT_NEAR(state.mean_photons(Beam::Probe)[4], 2.0, 1e-12);
}

TEST(AmplifyImage, ModeBudgetEnforced) {
    const Mask m = uniform_mask(65, 64);
    EXPECT_THROW(amplify_image(masked_seed(m.grid, m, 1.0), 2.0), ResourceError);
    EXPECT_NO_THROW(amplify_image(masked_seed(m.grid, m, 1.0), 2.0, 65 * 64));
}

TEST(AmplifyImage, SubUnitGainRejected) {
    const Mask m = uniform_mask(2, 2);
    EXPECT_THROW(amplify_image(masked_seed(m.grid, m, 1.0), 0.5), ValidationError);
}

TEST(ImageState, RejectsMislabeledBlocks) {
    const PixelGrid grid{2, 1, 1.0};
    std::vector<GaussianState> blocks{vacuum_state({probe_mode(0), conjugate_mode(0)}),
                                      vacuum_state({probe_mode(0), conjugate_mode(1)})};
    EXPECT_THROW(ImageState(grid, blocks), ValidationError);
    EXPECT_THROW(ImageState(grid, {blocks[0]}), ValidationError);
}

TEST(ImageState, MatchesDenseStateMeasurements) {
    Mask m = uniform_mask(3, 2);
    m.transmission = {1.0, 0.5, 0.0, 0.2, 1.0, 0.7};
    const auto state = amplify_image(masked_seed(m.grid, m, 4.0), 2.5);
    const auto dense = state.to_dense();
    const std::vector<ModeLabel> p{probe_mode(0), probe_mode(1), probe_mode(4)};
    const std::vector<ModeLabel> c{conjugate_mode(0), conjugate_mode(3), conjugate_mode(5)};
    EXPECT_NEAR(intensity_difference_db(state, p, c), intensity_difference_db(dense, p, c), 1e-10);
    const auto spec = lo_profile_from_mask(m, 0.3, 0.8);
    EXPECT_NEAR(homodyne_variance(state, spec, Beam::Conjugate), homodyne_variance(dense, spec, Beam::Conjugate),
                1e-12);
    EXPECT_NEAR(inseparability(state, spec, spec).inseparability, inseparability(dense, spec, spec).inseparability,
                1e-12);
}

TEST(ImageState, UnknownPixelIsLookupError) {
    const auto state = vacuum_image({2, 2, 1.0}, 2.0);
    EXPECT_THROW(state.mode_mean(probe_mode(9)), LookupError);
    EXPECT_THROW(state.block(4), LookupError);
}

TEST(RegionWeights, AllPixelsEqualsWholeBeam) {
    const Mask m = uniform_mask(4, 4);
    const auto state = amplify_image(masked_seed(m.grid, m, 100.0), 2.0);
    const auto all = RegionSelector::all(m.grid);
    std::vector<ModeLabel> p, c;
    for (std::size_t k = 0; k < 16; ++k) {
        p.push_back(probe_mode(k));
        c.push_back(conjugate_mode(k));
    }
    EXPECT_NEAR(subregion_intensity_difference_db(state, all, all), intensity_difference_db(state, p, c), 1e-12);
    EXPECT_EQ(region_weights(all), std::vector<double>(16, 1.0));
}

TEST(RegionWeights, SinglePixelMatchesWholeUniformBeam) {
    const Mask m = uniform_mask(4, 4);
    const auto state = amplify_image(masked_seed(m.grid, m, 100.0), 2.0);
    RegionSelector one{m.grid, std::vector<bool>(16, false)};
    one.included[5] = true;
    const auto all = RegionSelector::all(m.grid);
    EXPECT_NEAR(subregion_intensity_difference_db(state, one, one), subregion_intensity_difference_db(state, all, all),
                1e-9);
}

TEST(RegionWeights, ComplementsPartitionPhotonNumber) {
    Mask m = uniform_mask(4, 2);
    m.transmission = {1, 0.3, 0, 1, 0.5, 0.5, 1, 0.1};
    const auto state = amplify_image(masked_seed(m.grid, m, 10.0), 1.7);
    RegionSelector r{m.grid, {true, false, true, true, false, false, true, false}};
    const double part = state.photon_sum_moments({{probe_mode(0), 1}, {probe_mode(2), 1}, {probe_mode(3), 1},
                                                  {probe_mode(6), 1}})
                            .mean;
    double rest = 0.0;
    for (const auto& mode : region_modes(r.complement(), Beam::Probe))
        rest += state.photon_sum_moments({{mode, 1.0}}).mean;
    const auto per_pixel = state.mean_photons(Beam::Probe);
    EXPECT_NEAR(part + rest, std::accumulate(per_pixel.begin(), per_pixel.end(), 0.0), 1e-9);
}

TEST(RegionWeights, EmptySelectionRejected) {
    RegionSelector none{{2, 2, 1.0}, std::vector<bool>(4, false)};
    EXPECT_THROW(region_weights(none), ValidationError);
}

TEST(RegionFromImage, ThresholdAtHalf) {
    const auto r = region_from_image(parse_pgm("P2\n4 1\n100\n0 49 50 100\n"));
    EXPECT_EQ(r.included, (std::vector<bool>{false, false, true, true}));
}

TEST(SubregionIntensity, MatchedRegionsOfUniformImage) {
    const Mask m = uniform_mask(6, 6);
    const auto state = amplify_image(masked_seed(m.grid, m, 100.0), 2.0);
    RegionSelector left{m.grid, std::vector<bool>(36, false)};
    for (std::size_t k = 0; k < 36; k += 6) left.included[k] = true;
    const auto all = RegionSelector::all(m.grid);
    // 100^2 photons per pixel is bright enough for the asymptotic law.
    EXPECT_NEAR(subregion_intensity_difference_db(state, left, left), -4.77, 0.01);
    EXPECT_NEAR(subregion_intensity_difference_db(state, left, left), subregion_intensity_difference_db(state, all, all),
                1e-9);
}

TEST(SubregionIntensity, MismatchedRegionsCarryExcessNoise) {
    const Mask m = uniform_mask(6, 6);
    const auto state = amplify_image(masked_seed(m.grid, m, 100.0), 2.0);
    RegionSelector left{m.grid, std::vector<bool>(36, false)};
    for (std::size_t k = 0; k < 36; k += 6) left.included[k] = true;
    EXPECT_NEAR(subregion_intensity_difference_db(state, left, left.complement()), 10 * std::log10(3.0), 1e-3);
}

TEST(SubregionIntensity, UnitGainIsAtShotNoise) {
    const Mask m = uniform_mask(3, 3);
    const auto state = amplify_image(masked_seed(m.grid, m, 100.0), 1.0);
    RegionSelector a{m.grid, std::vector<bool>(9, false)};
    a.included[0] = true;
    // A G = 1 conjugate carries no light, so include the probe pixel itself on both sides.
    EXPECT_NEAR(subregion_intensity_difference_db(state, a, a.complement()), 0.0, 1e-9);
    EXPECT_NEAR(subregion_intensity_difference_db(state, a, a), 0.0, 1e-9);
}

TEST(SubregionIntensity, DarkRegionsAreUndefined) {
    Mask m = uniform_mask(2, 1);
    m.transmission = {1.0, 0.0};
    const auto state = amplify_image(masked_seed(m.grid, m, 10.0), 1.0);
    RegionSelector dark{m.grid, {false, true}};
    EXPECT_THROW(subregion_intensity_difference_db(state, dark, dark), MeasurementUndefined);
}

TEST(LoProfile, UniformMaskGivesFlatWeights) {
    const auto spec = lo_profile_from_mask(uniform_mask(4, 2), 0.0, 1.0);
    for (double w : spec.weights) EXPECT_NEAR(w, 1.0 / std::sqrt(8.0), 1e-15);
}

TEST(LoProfile, SinglePixelMaskGivesUnitWeight) {
    Mask m = uniform_mask(3, 1, 0.0);
    m.transmission[1] = 0.3;
    const auto spec = lo_profile_from_mask(m, 0.0, 1.0);
    EXPECT_EQ(spec.weights, (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(LoProfile, TGlyphHasSeventeenEqualWeights) {
    const auto spec = lo_profile_from_mask(load_mask(kMasks + "t_glyph.pgm"), 0.0, 1.0);
    int lit = 0;
    for (double w : spec.weights) {
        if (w == 0.0) continue;
        ++lit;
        EXPECT_NEAR(w, 1.0 / std::sqrt(17.0), 1e-15);
    }
    EXPECT_EQ(lit, 17);
    const auto state = vacuum_image({16, 16, 1.0}, 2.0);
    EXPECT_NEAR(inseparability(state, spec, spec).inseparability, 2.0 * std::pow(std::sqrt(2.0) - 1.0, 2), 1e-12);
}

TEST(LoProfile, AllZeroMaskRejected) {
    EXPECT_THROW(lo_profile_from_mask(uniform_mask(2, 2, 0.0), 0.0, 1.0), ValidationError);
}

TEST(IntensityImage, ScalesToFullRange) {
    const auto img = intensity_image({3, 1, 1.0}, {0.0, 1.0, 4.0});
    EXPECT_EQ(img.pixels, (std::vector<std::uint32_t>{0, 16384, 65535}));
    EXPECT_EQ(intensity_image({2, 1, 1.0}, {0.0, 0.0}).pixels, (std::vector<std::uint32_t>{0, 0}));
    EXPECT_THROW(intensity_image({2, 1, 1.0}, {0.0}), ValidationError);
}

TEST(PixelGrid, AngleMappingIsCenteredOnPeak) {
    const PixelGrid grid{3, 3, 2.0};
    EXPECT_DOUBLE_EQ(grid.pixel_angle_mrad(4, 7.0), 7.0);
    EXPECT_DOUBLE_EQ(grid.pixel_angle_mrad(3, 7.0), 5.0);
    EXPECT_DOUBLE_EQ(grid.pixel_angle_mrad(1, 7.0), std::hypot(7.0, 2.0));
    EXPECT_THROW(grid.pixel_angle_mrad(9, 7.0), LookupError);
    EXPECT_THROW((PixelGrid{0, 3, 1.0}.validate()), ValidationError);
}
