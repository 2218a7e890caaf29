#include "hsi/indices.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "hsi/textio.hpp"

namespace hsi {

void IndexSpec::validate() const {
    if (name.empty()) throw Error("index spec: name must not be empty");
    if (!(low.lo_nm <= low.hi_nm) || !(high.lo_nm <= high.hi_nm))
        throw Error("index spec '" + name + "': window bounds must satisfy lo <= hi");
    if (!(low.lo_nm > 0.0) || !(high.lo_nm > 0.0))
        throw Error("index spec '" + name + "': wavelengths must be positive");
}

const std::map<std::string, IndexSpec>& index_presets() {
    static const std::map<std::string, IndexSpec> presets = {
        {"landsat8", {"landsat8", {640.0, 670.0}, {850.0, 880.0}}},
        {"landsat47", {"landsat47", {630.0, 690.0}, {760.0, 900.0}}},
    };
    return presets;
}

IndexSpec default_index_spec() { return index_presets().at("landsat8"); }

IndexSpec load_index_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open index spec file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        IndexSpec spec;
        spec.name = j.at("name").get<std::string>();
        spec.low = {j.at("low_window_nm").at(0).get<double>(),
                    j.at("low_window_nm").at(1).get<double>()};
        spec.high = {j.at("high_window_nm").at(0).get<double>(),
                     j.at("high_window_nm").at(1).get<double>()};
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": invalid index spec: " + e.what());
    }
}

void save_index_spec(const IndexSpec& spec, const std::string& path) {
    spec.validate();
    nlohmann::json j;
    j["name"] = spec.name;
    j["low_window_nm"] = {spec.low.lo_nm, spec.low.hi_nm};
    j["high_window_nm"] = {spec.high.lo_nm, spec.high.hi_nm};
    std::ofstream out(path);
    if (!out) throw Error("cannot write index spec file '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw Error("write failed for '" + path + "'");
}

double band_window_mean(Spectrum s, const WavelengthGrid& grid, BandWindow window) {
    if (s.size() != grid.size())
        throw Error("band_window_mean: spectrum has " + std::to_string(s.size()) +
                    " bands, grid has " + std::to_string(grid.size()));
    if (!(window.lo_nm <= window.hi_nm))
        throw Error("band_window_mean: window bounds must satisfy lo <= hi");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t b = 0; b < grid.size(); ++b)
        if (grid[b] >= window.lo_nm && grid[b] <= window.hi_nm) {
            sum += s[b];
            ++n;
        }
    if (n == 0)
        return s[nearest_band(grid, 0.5 * (window.lo_nm + window.hi_nm))];
    return sum / static_cast<double>(n);
}

double ndvi(Spectrum s, const WavelengthGrid& grid, const IndexSpec& spec) {
    const double low = band_window_mean(s, grid, spec.low);
    const double high = band_window_mean(s, grid, spec.high);
    const double denom = high + low;
    if (denom == 0.0)
        throw Error("index '" + spec.name + "' is undefined: window means sum to zero");
    return (high - low) / denom;
}

double iso_index_slope(double v) {
    if (v < -1.0 || v > 1.0)
        throw Error("iso_index_slope: index value " + format_double(v) +
                    " outside [-1, 1]");
    if (v == 1.0)
        throw Error("iso_index_slope: slope is infinite at index value 1");
    return (v + 1.0) / (1.0 - v);
}

std::vector<double> index_map(const SpectralCube& cube, const IndexSpec& spec) {
    spec.validate();
    std::vector<double> out(cube.pixel_count());
    std::vector<double> px(cube.bands());
    for (std::size_t l = 0; l < cube.lines; ++l)
        for (std::size_t s = 0; s < cube.samples; ++s) {
            const auto raw = cube.pixel(l, s);
            for (std::size_t b = 0; b < raw.size(); ++b)
                px[b] = static_cast<double>(raw[b]);
            const double low = band_window_mean(px, cube.grid, spec.low);
            const double high = band_window_mean(px, cube.grid, spec.high);
            const double denom = high + low;
            out[l * cube.samples + s] =
                denom == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                             : (high - low) / denom;
        }
    return out;
}

} // namespace hsi
