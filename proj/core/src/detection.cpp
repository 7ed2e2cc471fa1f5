#include "twinbeam/detection.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>
#include <sstream>

namespace twinbeam {

void HomodyneSpec::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ValidationError("detection efficiency must lie in [0, 1]");
    if (!std::isfinite(lo_phase)) throw ValidationError("LO phase must be finite");
    double norm2 = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) throw ValidationError("LO weights must be finite");
        norm2 += w * w;
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > kNormTolerance) throw ValidationError("LO weights must have unit L2 norm");
}

HomodyneSpec HomodyneSpec::single_pixel(std::size_t pixel, std::size_t pixels, double lo_phase, double efficiency) {
    if (pixel >= pixels) throw ValidationError("LO pixel out of range");
    HomodyneSpec spec{std::vector<double>(pixels, 0.0), lo_phase, efficiency};
    spec.weights[pixel] = 1.0;
    spec.validate();
    return spec;
}

NoiseTrace::NoiseTrace(std::vector<double> abscissa, std::vector<double> values_db, std::string label)
    : abscissa_(std::move(abscissa)), values_db_(std::move(values_db)), label_(std::move(label)) {
    if (abscissa_.size() != values_db_.size()) throw ValidationError("trace abscissa and values differ in length");
    if (label_.find('\n') != std::string::npos) throw ValidationError("trace label must be a single line");
    for (std::size_t i = 0; i < abscissa_.size(); ++i) {
        if (!std::isfinite(abscissa_[i]) || !std::isfinite(values_db_[i]))
            throw ValidationError("trace '" + label_ + "' has a non-finite point at index " + std::to_string(i));
        if (i > 0 && !(abscissa_[i] > abscissa_[i - 1]))
            throw ValidationError("trace '" + label_ + "' abscissa is not strictly increasing");
    }
}

std::string NoiseTrace::to_csv() const {
    std::string out = "# " + label_ + "\nabscissa,value_db\n";
    char buf[64];
    for (std::size_t i = 0; i < abscissa_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", abscissa_[i], values_db_[i]);
        out += buf;
    }
    return out;
}

NoiseTrace NoiseTrace::from_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    auto next = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++lineno;
        return true;
    };
    if (!next() || line.rfind("# ", 0) != 0) throw ParseError(source, 1, 1, "expected '# label' header");
    std::string label = line.substr(2);
    if (!next() || line != "abscissa,value_db") throw ParseError(source, 2, 1, "expected 'abscissa,value_db' header");

    std::vector<double> xs;
    std::vector<double> ys;
    while (next()) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(source, lineno, 1, "expected two comma-separated values");
        const std::string a = line.substr(0, comma);
        const std::string b = line.substr(comma + 1);
        char* end = nullptr;
        const double x = std::strtod(a.c_str(), &end);
        if (a.empty() || *end != '\0') throw ParseError(source, lineno, 1, "malformed abscissa '" + a + "'");
        const double y = std::strtod(b.c_str(), &end);
        if (b.empty() || *end != '\0') throw ParseError(source, lineno, comma + 2, "malformed value '" + b + "'");
        xs.push_back(x);
        ys.push_back(y);
    }
    return NoiseTrace(std::move(xs), std::move(ys), std::move(label));
}

void TechnicalNoiseSpec::validate() const {
    // -inf disables a floor; +inf and NaN are rejected.
    if (std::isnan(electronic_floor_db) || electronic_floor_db == std::numeric_limits<double>::infinity())
        throw ValidationError("electronic floor must be finite or disabled");
    if (std::isnan(pump_scatter_db) || pump_scatter_db == std::numeric_limits<double>::infinity())
        throw ValidationError("pump scatter level must be finite or disabled");
}

NoiseTrace apply_technical_noise(const NoiseTrace& trace, const TechnicalNoiseSpec& spec) {
    spec.validate();
    if (!spec.enabled()) return trace;
    const double floor = from_db(spec.electronic_floor_db) + from_db(spec.pump_scatter_db);
    std::vector<double> values(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) values[i] = to_db(from_db(trace.values_db()[i]) + floor);
    return NoiseTrace(trace.abscissa(), std::move(values), trace.label());
}

namespace detail {

void require_intensity_sets(const std::vector<ModeLabel>& probe_set, const std::vector<ModeLabel>& conj_set) {
    if (probe_set.empty() || conj_set.empty()) throw ValidationError("intensity detection needs nonempty mode sets");
    std::set<ModeLabel> seen;
    for (const auto& m : probe_set) {
        if (!seen.insert(m).second) throw ValidationError("mode " + describe(m) + " listed twice");
    }
    for (const auto& m : conj_set) {
        if (!seen.insert(m).second) throw ValidationError("probe and conjugate sets overlap at " + describe(m));
    }
}

}  // namespace detail

std::vector<double> uniform_phases(std::size_t steps) {
    if (steps == 0) throw ValidationError("phase grid needs at least one step");
    std::vector<double> phases(steps);
    for (std::size_t k = 0; k < steps; ++k)
        phases[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(steps);
    return phases;
}

}  // namespace twinbeam
