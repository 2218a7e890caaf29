#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsi/spectra_io.hpp"

namespace hsi {

/// Logistic step in reflectance, e.g. the chlorophyll red edge.
struct SigmoidEdge {
    double center_nm = 715.0;
    double width_nm = 15.0;
    double low = 0.0;
    double high = 0.4;
};

/// Gaussian absorption dip (width is the Gaussian sigma).
struct GaussianDip {
    double center_nm = 0.0;
    double depth = 0.0;
    double width_nm = 1.0;
};

/// Analytic reflectance model: piecewise-linear continuum, plus an optional
/// sigmoid edge, minus Gaussian dips, plus per-band Gaussian noise at
/// generation time. Generated values are clipped to [0, 1.2].
struct MaterialModel {
    std::string name;
    std::vector<std::pair<double, double>> baseline; // (nm, reflectance) knots
    std::optional<SigmoidEdge> red_edge;
    std::vector<GaussianDip> absorptions;
    double noise_std = 0.01;

    /// Noise-free, clip-free curve value.
    double reflectance_at(double nm) const;
    void validate() const;
};

/// 181 bands over [400, 2400] nm.
WavelengthGrid vegetation_grid();
/// 452 bands over [400, 2450] nm.
WavelengthGrid polymer_grid();

/// Three vegetation analogs: strong red edge, moderate red edge with a
/// green bump, weak-edge senesced.
std::vector<MaterialModel> vegetation_preset();
std::vector<std::size_t> vegetation_counts(); // {2580, 168, 104}

/// Ten polymer analogs with distinct absorption signatures.
std::vector<MaterialModel> polymer_preset();
std::vector<std::size_t> polymer_counts();

/// counts[i] samples of models[i], labels in model order, deterministic per
/// seed (noise drawn class-major, then sample, then band).
LabeledDataset generate_dataset(const std::vector<MaterialModel>& models,
                                const std::vector<std::size_t>& counts,
                                const WavelengthGrid& grid, std::uint64_t seed);

/// Inclusive pixel rectangle filled from one material.
struct SceneRegion {
    std::size_t line_first = 0, line_last = 0;
    std::size_t sample_first = 0, sample_last = 0;
    std::size_t material = 0; // index into the models list
};

struct Scene {
    std::size_t lines = 0, samples = 0;
    std::vector<SceneRegion> regions;
};

/// Horizontal stripes, one per material, as a ready-made scene.
Scene striped_scene(std::size_t lines, std::size_t samples, std::size_t n_materials);

/// Per-pixel draw from the covering region's material (first region wins on
/// overlap); returns the cube and the ground-truth label map (lines x
/// samples, row-major). Throws if any pixel is uncovered.
std::pair<SpectralCube, std::vector<int>> generate_cube(
    const Scene& scene, const std::vector<MaterialModel>& models,
    const WavelengthGrid& grid, std::uint64_t seed);

/// JSON (de)serialization of material lists.
void save_materials(const std::vector<MaterialModel>& models, const std::string& path);
std::vector<MaterialModel> load_materials(const std::string& path);

} // namespace hsi
