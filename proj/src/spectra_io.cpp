#include "hsi/spectra_io.hpp"

#include <cmath>

namespace hsi {

WavelengthGrid::WavelengthGrid(std::vector<double> nm) : nm_(std::move(nm)) {
    for (std::size_t i = 0; i < nm_.size(); ++i) {
        if (!(nm_[i] > 0.0))
            throw Error("wavelength grid: values must be positive, got " +
                        std::to_string(nm_[i]) + " at band " + std::to_string(i));
        if (i > 0 && !(nm_[i] > nm_[i - 1]))
            throw Error("wavelength grid: values must be strictly increasing "
                        "(band " + std::to_string(i) + ")");
    }
}

void SpectralCube::validate() const {
    if (data.size() != lines * samples * bands())
        throw Error("cube: data length " + std::to_string(data.size()) +
                    " does not match lines*samples*bands = " +
                    std::to_string(lines * samples * bands()));
    for (float v : data)
        if (!std::isfinite(v)) throw Error("cube: non-finite reflectance value");
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (int l : labels) counts[static_cast<std::size_t>(l)]++;
    return counts;
}

void LabeledDataset::validate(bool require_populated_classes) const {
    if (spectra.rows() != labels.size())
        throw Error("dataset: " + std::to_string(spectra.rows()) + " spectra vs " +
                    std::to_string(labels.size()) + " labels");
    if (spectra.rows() > 0 && spectra.cols() != grid.size())
        throw Error("dataset: spectra have " + std::to_string(spectra.cols()) +
                    " bands, grid has " + std::to_string(grid.size()));
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= class_names.size())
            throw Error("dataset: label " + std::to_string(l) + " out of range for " +
                        std::to_string(class_names.size()) + " classes");
    if (!all_finite(spectra)) throw Error("dataset: non-finite reflectance value");
    if (require_populated_classes) {
        const auto counts = class_counts();
        for (std::size_t c = 0; c < counts.size(); ++c)
            if (counts[c] == 0)
                throw Error("dataset: class '" + class_names[c] + "' has no samples");
    }
}

std::size_t nearest_band(const WavelengthGrid& grid, double target_nm) {
    if (grid.empty()) throw Error("nearest_band: empty wavelength grid");
    std::size_t best = 0;
    double best_dist = std::abs(grid[0] - target_nm);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double d = std::abs(grid[i] - target_nm);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

LabeledDataset extract_rois(const SpectralCube& cube,
                            const std::vector<RegionOfInterest>& rois) {
    const std::size_t bands = cube.bands();
    std::vector<std::string> names;
    std::vector<int> roi_label(rois.size());
    std::size_t total = 0;
    for (std::size_t r = 0; r < rois.size(); ++r) {
        const auto& roi = rois[r];
        if (roi.line_last >= cube.lines || roi.sample_last >= cube.samples ||
            roi.line_first > roi.line_last || roi.sample_first > roi.sample_last)
            throw Error("ROI '" + roi.class_name + "': out of bounds for cube " +
                        std::to_string(cube.lines) + "x" + std::to_string(cube.samples));
        int label = -1;
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == roi.class_name) label = static_cast<int>(i);
        if (label < 0) {
            label = static_cast<int>(names.size());
            names.push_back(roi.class_name);
        }
        roi_label[r] = label;
        total += (roi.line_last - roi.line_first + 1) *
                 (roi.sample_last - roi.sample_first + 1);
    }

    LabeledDataset ds;
    ds.grid = cube.grid;
    ds.class_names = std::move(names);
    ds.spectra = Matrix(total, bands);
    ds.labels.reserve(total);
    std::size_t row = 0;
    for (std::size_t r = 0; r < rois.size(); ++r) {
        const auto& roi = rois[r];
        for (std::size_t l = roi.line_first; l <= roi.line_last; ++l)
            for (std::size_t s = roi.sample_first; s <= roi.sample_last; ++s) {
                const auto px = cube.pixel(l, s);
                for (std::size_t b = 0; b < bands; ++b)
                    ds.spectra(row, b) = static_cast<double>(px[b]);
                ds.labels.push_back(roi_label[r]);
                ++row;
            }
    }
    return ds;
}

Matrix class_mean_spectra(const LabeledDataset& ds) {
    if (ds.size() == 0) throw Error("class_mean_spectra: empty dataset");
    const std::size_t nc = ds.class_count();
    Matrix means(nc, ds.bands());
    std::vector<std::size_t> counts(nc, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto c = static_cast<std::size_t>(ds.labels[i]);
        counts[c]++;
        const auto row = ds.spectra.row(i);
        for (std::size_t b = 0; b < ds.bands(); ++b)
            means(c, b) += row[b];
    }
    for (std::size_t c = 0; c < nc; ++c) {
        if (counts[c] == 0)
            throw Error("class_mean_spectra: class '" + ds.class_names[c] +
                        "' has no samples");
        for (std::size_t b = 0; b < ds.bands(); ++b)
            means(c, b) /= static_cast<double>(counts[c]);
    }
    return means;
}

} // namespace hsi
