#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsi/error.hpp"
#include "hsi/matrix.hpp"

namespace hsi {

/// One reflectance value per band; zero-copy view into a dataset row or a
/// cube pixel.
using Spectrum = std::span<const double>;

/// Band-center wavelengths in nanometers; strictly increasing, positive.
class WavelengthGrid {
public:
    WavelengthGrid() = default;
    explicit WavelengthGrid(std::vector<double> nm);

    std::size_t size() const { return nm_.size(); }
    bool empty() const { return nm_.empty(); }
    double operator[](std::size_t i) const { return nm_[i]; }
    const std::vector<double>& values() const { return nm_; }
    auto begin() const { return nm_.begin(); }
    auto end() const { return nm_.end(); }

    bool operator==(const WavelengthGrid&) const = default;

private:
    std::vector<double> nm_;
};

/// Dense reflectance raster, canonical (line, sample, band) order in memory
/// whatever the on-disk interleave was. Payload stays float32 to match the
/// raster format bit-for-bit.
struct SpectralCube {
    std::size_t lines = 0;
    std::size_t samples = 0;
    WavelengthGrid grid;
    std::vector<float> data;

    std::size_t bands() const { return grid.size(); }
    std::size_t pixel_count() const { return lines * samples; }
    std::span<const float> pixel(std::size_t line, std::size_t sample) const {
        return {data.data() + (line * samples + sample) * bands(), bands()};
    }
    void validate() const;
};

/// Row-per-sample spectra with class labels. Class names are ordered by
/// first appearance in whatever source built the dataset.
struct LabeledDataset {
    Matrix spectra; // n_samples x bands
    std::vector<int> labels;
    std::vector<std::string> class_names;
    WavelengthGrid grid;

    std::size_t size() const { return labels.size(); }
    std::size_t bands() const { return grid.size(); }
    std::size_t class_count() const { return class_names.size(); }
    std::vector<std::size_t> class_counts() const;

    /// Shape/label-range checks; `require_populated_classes` additionally
    /// demands at least one sample per class (loaders enforce it, split
    /// outputs with extreme fractions may not satisfy it).
    void validate(bool require_populated_classes = true) const;
};

/// Inclusive pixel rectangle labeled with a class name.
struct RegionOfInterest {
    std::string class_name;
    std::size_t line_first = 0, line_last = 0;
    std::size_t sample_first = 0, sample_last = 0;
};

enum class Interleave { bsq, bil, bip };

Interleave parse_interleave(std::string_view text);
std::string_view interleave_name(Interleave il);

/// Reads an ENVI-style header + flat float32 raster pair into canonical
/// order. Supported header keys: samples, lines, bands, data type (4 only),
/// interleave, byte order, wavelength. Wavelengths under 100 are taken as
/// micrometers and converted.
SpectralCube load_cube(const std::string& raster_path, const std::string& header_path);

/// Inverse of load_cube; any interleave/byte order round-trips bit-for-bit.
void save_cube(const SpectralCube& cube, const std::string& raster_path,
               const std::string& header_path, Interleave il,
               int byte_order = 0);

/// CSV with header `wl0,wl1,...,label`; one spectrum + class name per row.
LabeledDataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const LabeledDataset& ds, const std::string& path);

/// Index of the band whose wavelength is closest to target; ties go to the
/// lower index.
std::size_t nearest_band(const WavelengthGrid& grid, double target_nm);

/// One labeled sample per pixel per ROI membership.
LabeledDataset extract_rois(const SpectralCube& cube,
                            const std::vector<RegionOfInterest>& rois);

/// Row c = mean spectrum of class c.
Matrix class_mean_spectra(const LabeledDataset& ds);

} // namespace hsi
