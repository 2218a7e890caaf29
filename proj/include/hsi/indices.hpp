#pragma once

#include <map>
#include <string>
#include <vector>

#include "hsi/spectra_io.hpp"

namespace hsi {

/// Closed wavelength interval [lo_nm, hi_nm]; lo_nm == hi_nm selects a
/// single wavelength.
struct BandWindow {
    double lo_nm = 0.0;
    double hi_nm = 0.0;
};

/// A named normalized-difference index: (high - low) / (high + low), where
/// each term is the mean reflectance over its window.
struct IndexSpec {
    std::string name;
    BandWindow low;  // subtrahend, e.g. Red
    BandWindow high; // minuend, e.g. NIR

    void validate() const;
};

/// Built-in window presets, keyed by name. "landsat8" (Red 640-670,
/// NIR 850-880) is the default vegetation spec; "landsat47" uses the wider
/// legacy windows.
const std::map<std::string, IndexSpec>& index_presets();
IndexSpec default_index_spec();

/// JSON file form: {"name": ..., "low_window_nm": [lo, hi],
/// "high_window_nm": [lo, hi]}.
IndexSpec load_index_spec(const std::string& path);
void save_index_spec(const IndexSpec& spec, const std::string& path);

/// Mean reflectance over the bands inside the closed window; if the window
/// misses every band, falls back to the single band nearest the window
/// center.
double band_window_mean(Spectrum s, const WavelengthGrid& grid, BandWindow window);

/// (high - low) / (high + low). Throws when the denominator is exactly zero.
double ndvi(Spectrum s, const WavelengthGrid& grid, const IndexSpec& spec);

/// Slope of the through-origin iso-index line in the (low, high) plane:
/// (v + 1) / (1 - v). Domain [-1, 1); v = 1 is an infinite slope.
double iso_index_slope(double ndvi_value);

/// Per-pixel index values, lines x samples row-major; pixels with a zero
/// denominator become quiet NaN.
std::vector<double> index_map(const SpectralCube& cube, const IndexSpec& spec);

} // namespace hsi
