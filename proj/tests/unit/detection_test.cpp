#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "twinbeam/detection.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/fwm_amplifier.hpp"

using namespace twinbeam;

namespace {

const ModeLabel a = probe_mode();
const ModeLabel b = conjugate_mode();
const HomodyneSpec lo = HomodyneSpec::single_pixel(0);

GaussianState tmsv(double g) { return apply_symplectic(vacuum_state({a, b}), tms_symplectic({g, a, b})); }

GaussianState coherent_pair(double n_probe, double n_conj) {
    auto s = displace(vacuum_state({a, b}), a, seed_x_for_photons(n_probe), 0.0);
    return displace(s, b, seed_x_for_photons(n_conj), 0.0);
}

}  // namespace

TEST(SqlIntensityDifference, CoherentBeamsAddTheirPhotonNumbers) {
    EXPECT_NEAR(sql_intensity_difference(coherent_pair(100, 50), {a}, {b}), 150.0, 1e-10);
}

TEST(SqlIntensityDifference, VacuumIsZero) {
    EXPECT_DOUBLE_EQ(sql_intensity_difference(vacuum_state({a, b}), {a}, {b}), 0.0);
}

TEST(SqlIntensityDifference, SeededAmplifierOutput) {
    const auto s = seeded_amplifier_output(2.0, seed_x_for_photons(100.0), 0.0);
    // 201 probe photons (200 stimulated + 1 spontaneous) and 101 conjugate photons.
    EXPECT_NEAR(sql_intensity_difference(s, {a}, {b}), 302.0, 1e-9);
}

TEST(SqlIntensityDifference, EmptyOrOverlappingSetsRejected) {
    const auto s = coherent_pair(1, 1);
    EXPECT_THROW(sql_intensity_difference(s, {}, {b}), ValidationError);
    EXPECT_THROW(sql_intensity_difference(s, {a}, {}), ValidationError);
    EXPECT_THROW(sql_intensity_difference(s, {a}, {a}), ValidationError);
    EXPECT_THROW(sql_intensity_difference(s, {a}, {probe_mode(7)}), LookupError);
}

TEST(IntensityDifferenceDb, NoiseReductionExamples) {
    const double x = seed_x_for_photons(1e4);
    EXPECT_NEAR(intensity_difference_db(seeded_amplifier_output(2.0, x, 0.0), {a}, {b}), -4.77, 5e-3);
    EXPECT_NEAR(intensity_difference_db(seeded_amplifier_output(3.655, x, 0.0), {a}, {b}), -8.0, 0.05);
    EXPECT_NEAR(intensity_difference_db(seeded_amplifier_output(1.0, x, 0.0), {a}, {b}), 0.0, 1e-9);
}

TEST(IntensityDifferenceDb, UnseededVacuumIsUndefined) {
    try {
        intensity_difference_db(vacuum_state({a, b}), {a}, {b});
        FAIL() << "expected MeasurementUndefined";
    } catch (const MeasurementUndefined& e) {
        EXPECT_NE(std::string(e.what()).find("bright-beam measurement undefined"), std::string::npos);
    }
    EXPECT_THROW(linearized_intensity_difference_db(vacuum_state({a, b}), {a}, {b}), MeasurementUndefined);
}

TEST(IntensityDifferenceDb, LinearizedEstimateAgreesForBrightBeams) {
    for (double g : {1.0, 1.5, 2.0, 3.655, 6.0}) {
        for (double alpha_sq : {1e4, 1e5}) {
            const auto s = seeded_amplifier_output(g, seed_x_for_photons(alpha_sq), 0.0);
            EXPECT_NEAR(intensity_difference_db(s, {a}, {b}), linearized_intensity_difference_db(s, {a}, {b}), 0.05)
                << g << " " << alpha_sq;
        }
    }
}

TEST(HomodyneVariance, VacuumIsHalfAtAnyPhaseAndEfficiency) {
    const auto vac = vacuum_state({a, b});
    for (double theta : {0.0, 0.3, 1.0, 2.5})
        for (double eta : {0.0, 0.5, 1.0})
            EXPECT_NEAR(homodyne_variance(vac, HomodyneSpec::single_pixel(0, 1, theta, eta), Beam::Probe), 0.5,
                        1e-15);
}

TEST(HomodyneVariance, EachTwinBeamAloneIsThermal) {
    EXPECT_NEAR(homodyne_variance(tmsv(2.0), lo, Beam::Probe), 1.5, 1e-12);
    EXPECT_NEAR(homodyne_variance(tmsv(2.0), lo, Beam::Conjugate), 1.5, 1e-12);
}

TEST(HomodyneVariance, EfficiencyMixesInVacuum) {
    EXPECT_NEAR(homodyne_variance(tmsv(2.0), HomodyneSpec::single_pixel(0, 1, 0.0, 0.5), Beam::Probe), 1.0, 1e-12);
}

TEST(HomodyneVariance, DimensionMismatchRejected) {
    EXPECT_THROW(homodyne_variance(tmsv(2.0), HomodyneSpec::single_pixel(0, 2), Beam::Probe), ValidationError);
}

TEST(HomodyneSpec, ValidatesNormAndEfficiency) {
    EXPECT_THROW((HomodyneSpec{{1.0, 1.0}, 0.0, 1.0}.validate()), ValidationError);
    EXPECT_THROW((HomodyneSpec{{1.0}, 0.0, 1.5}.validate()), ValidationError);
    EXPECT_THROW((HomodyneSpec{{}, 0.0, 1.0}.validate()), ValidationError);
    EXPECT_NO_THROW((HomodyneSpec{{std::sqrt(0.5), std::sqrt(0.5)}, 0.0, 1.0}.validate()));
    EXPECT_THROW(HomodyneSpec::single_pixel(3, 2), ValidationError);
}

TEST(JointPhaseScan, TwinBeamExamples) {
    const auto s = tmsv(2.0);
    const auto scan = joint_phase_scan(s, lo, lo, {0.0, std::numbers::pi / 4});
    const double sq = 10 * std::log10(std::pow(std::sqrt(2.0) - 1.0, 2));
    EXPECT_NEAR(scan.diff.values_db()[0], sq, 1e-9);
    EXPECT_NEAR(scan.sum.values_db()[0], -sq, 1e-9);
    EXPECT_NEAR(scan.diff.values_db()[1], 10 * std::log10(3.0), 1e-9);
    EXPECT_NEAR(scan.sum.values_db()[1], 10 * std::log10(3.0), 1e-9);
}

TEST(JointPhaseScan, VacuumIsFlatAtZero) {
    const auto scan = joint_phase_scan(vacuum_state({a, b}), lo, lo, uniform_phases(16));
    for (double v : scan.diff.values_db()) EXPECT_NEAR(v, 0.0, 1e-12);
    for (double v : scan.sum.values_db()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(JointPhaseScan, EmptyPhaseListRejected) {
    EXPECT_THROW(joint_phase_scan(tmsv(2.0), lo, lo, {}), ValidationError);
}

TEST(JointPhaseScan, PeriodicAndAntiPhased) {
    const auto s = tmsv(2.5);
    constexpr double pi = std::numbers::pi;
    for (double theta : {0.0, 0.2, 0.7, 1.3, 2.9}) {
        const double d = joint_variance_at(s, lo, lo, JointSignal::Difference, theta);
        EXPECT_NEAR(d, joint_variance_at(s, lo, lo, JointSignal::Difference, theta + pi), 1e-12);
        EXPECT_NEAR(d, joint_variance_at(s, lo, lo, JointSignal::Sum, theta + pi / 2), 1e-12);
    }
}

TEST(JointPhaseScan, MinimaEqualGeneralizedQuadratureVariances) {
    const double g = 2.0;
    const double e2r = std::exp(-2 * squeeze_parameter(g));
    const auto scan = joint_phase_scan(tmsv(g), lo, lo, uniform_phases(256));
    const auto& d = scan.diff.values_db();
    const auto& u = scan.sum.values_db();
    EXPECT_NEAR(*std::min_element(d.begin(), d.end()), to_db(e2r), 1e-9);
    EXPECT_NEAR(*std::min_element(u.begin(), u.end()), to_db(e2r), 1e-9);
}

TEST(JointPhaseScan, IndependentModeOffsetsEachDetector) {
    const auto s = tmsv(2.0);
    HomodyneSpec p = lo, c = lo;
    c.lo_phase = std::numbers::pi;  // flips the conjugate signal, swapping difference and sum
    const double d = joint_variance_at(s, p, c, JointSignal::Difference, 0.0, PhaseMode::Independent);
    EXPECT_NEAR(d, joint_variance_at(s, lo, lo, JointSignal::Sum, 0.0), 1e-12);
    EXPECT_NEAR(joint_variance_at(s, p, c, JointSignal::Difference, 0.0, PhaseMode::Synchronous),
                joint_variance_at(s, lo, lo, JointSignal::Difference, 0.0), 1e-15);
}

TEST(JointPhaseScan, EfficiencyFloor) {
    const auto s = tmsv(50.0);
    for (double eta : {0.1, 0.5, 0.8, 0.9, 0.99}) {
        const auto spec = HomodyneSpec::single_pixel(0, 1, 0.0, eta);
        const double v = joint_variance_at(s, spec, spec, JointSignal::Difference, 0.0);
        const double ideal = joint_variance_at(s, lo, lo, JointSignal::Difference, 0.0);
        EXPECT_NEAR(v, eta * ideal + (1 - eta), 1e-12);
        EXPECT_GE(v, 1 - eta);
    }
}

TEST(UniformPhases, CoversOnePeriodWithoutEndpoint) {
    const auto p = uniform_phases(4);
    ASSERT_EQ(p.size(), 4u);
    EXPECT_DOUBLE_EQ(p[1], std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(p[3], 3 * std::numbers::pi / 2);
    EXPECT_THROW(uniform_phases(0), ValidationError);
}

TEST(TechnicalNoise, DisabledIsIdentity) {
    const NoiseTrace t({0, 1, 2}, {-7.66, 0.0, 3.0}, "x");
    const auto out = apply_technical_noise(t, {});
    EXPECT_EQ(out.values_db(), t.values_db());
    EXPECT_FALSE(TechnicalNoiseSpec{}.enabled());
}

TEST(TechnicalNoise, ElectronicFloorAddsInLinearPower) {
    const NoiseTrace t({0}, {10 * std::log10(0.17157)}, "x");
    TechnicalNoiseSpec spec;
    spec.electronic_floor_db = -15.0;
    const double v = apply_technical_noise(t, spec).values_db()[0];
    EXPECT_NEAR(v, 10 * std::log10(0.17157 + std::pow(10.0, -1.5)), 1e-12);
    EXPECT_NEAR(v, -6.93, 0.01);
}

TEST(TechnicalNoise, EqualFloorDoublesPower) {
    const NoiseTrace t({0}, {0.0}, "x");
    TechnicalNoiseSpec spec;
    spec.electronic_floor_db = 0.0;
    EXPECT_NEAR(apply_technical_noise(t, spec).values_db()[0], 3.0103, 1e-4);
    spec.pump_scatter_db = 0.0;
    EXPECT_NEAR(apply_technical_noise(t, spec).values_db()[0], 10 * std::log10(3.0), 1e-12);
}

TEST(TechnicalNoise, NonFiniteFloorRejected) {
    TechnicalNoiseSpec spec;
    spec.electronic_floor_db = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(spec.validate(), ValidationError);
    spec.electronic_floor_db = std::numeric_limits<double>::infinity();
    EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(NoiseTrace, RejectsBadAbscissaAndValues) {
    EXPECT_THROW(NoiseTrace({0, 0}, {1, 2}, "x"), ValidationError);
    EXPECT_THROW(NoiseTrace({1, 0}, {1, 2}, "x"), ValidationError);
    EXPECT_THROW(NoiseTrace({0, 1}, {1}, "x"), ValidationError);
    EXPECT_THROW(NoiseTrace({0, 1}, {1, std::nan("")}, "x"), ValidationError);
}

TEST(NoiseTrace, CsvFormatIsPinned) {
    const NoiseTrace t({0.0, 0.5}, {-7.655, 1.0 / 3.0}, "difference");
    EXPECT_EQ(t.to_csv(), "# difference\nabscissa,value_db\n0,-7.655\n0.5,0.333333333\n");
}

TEST(NoiseTrace, CsvRoundTrip) {
    const NoiseTrace t({0.0, 0.1, 0.2}, {1.5, -2.25, 3.125}, "sum");
    const auto back = NoiseTrace::from_csv(t.to_csv());
    EXPECT_EQ(back.label(), "sum");
    EXPECT_EQ(back.abscissa(), t.abscissa());
    EXPECT_EQ(back.values_db(), t.values_db());
}

TEST(NoiseTrace, MalformedCsvReportsLine) {
    try {
        NoiseTrace::from_csv("# x\nabscissa,value_db\n0,1\nbad\n", "t.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}
