#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hsi/matrix.hpp"
#include "hsi/spectra_io.hpp"

namespace hsi {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Class-index -> color table. Unlabeled pixels (label < 0) and NaN index
/// values render in the reserved sentinel color.
struct Palette {
    std::vector<Rgb> class_colors;
    Rgb sentinel{255, 0, 255};

    /// First three classes are blue, green, red; further classes come from
    /// a fixed distinct table (up to 16).
    static Palette default_for(std::size_t n_classes);
    void validate() const;
};

/// Binary PPM (P6), one pixel per raster cell, labels row-major
/// lines x samples.
void write_class_map(const std::vector<int>& labels, std::size_t lines,
                     std::size_t samples, const Palette& palette,
                     const std::string& path);

/// Grayscale P6, bands tall x neurons wide, columns in neuron_order,
/// min-max scaled over the whole matrix; a constant matrix renders
/// mid-gray.
void write_weight_heatmap(const Matrix& w1,
                          const std::vector<std::size_t>& neuron_order,
                          const std::string& path);

/// Grayscale P6 of index values linearly mapped from [-1, 1]; NaN renders
/// in the sentinel color.
void write_index_map(const std::vector<double>& values, std::size_t lines,
                     std::size_t samples, const std::string& path);

/// CSV `x_reflectance,y_reflectance,label` at the bands nearest x_nm/y_nm;
/// labels are written as class names.
void export_scatter_csv(const Matrix& spectra, const std::vector<int>& labels,
                        const std::vector<std::string>& class_names,
                        const WavelengthGrid& grid, double x_nm, double y_nm,
                        const std::string& path);

} // namespace hsi
