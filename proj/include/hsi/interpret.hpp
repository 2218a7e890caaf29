#pragma once

#include <string>
#include <vector>

#include "hsi/indices.hpp"
#include "hsi/mlp.hpp"

namespace hsi {

/// A hidden neuron attributed to the class whose output-layer weight on it
/// is largest.
struct NeuronAssignment {
    std::size_t neuron_index = 0;
    int assigned_class = 0;
    double assignment_weight = 0.0;
};

/// Per-band mean and population standard deviation of the input weights of
/// a class's top-k hidden neurons.
struct FeatureProfile {
    int class_index = 0;
    std::vector<std::size_t> neuron_indices; // descending output weight
    std::vector<double> weight_mean;         // per band
    std::vector<double> weight_std;          // per band, population (divide by k)
};

/// Through-origin separability of one class pair in the (red, nir) plane.
struct PairSeparation {
    int class_a = 0;
    int class_b = 0;
    double separation = 0.0;  // best fraction of points on the correct side
    double slope = 0.0;       // slope achieving it
    double implied_ndvi = 0.0; // (slope - 1) / (slope + 1)
};

struct SeparabilityReport {
    std::size_t red_band = 0;
    std::size_t nir_band = 0;
    std::vector<PairSeparation> pairs;
};

/// One assignment per hidden neuron: argmax over the neuron's output-layer
/// weight row, ties to the lower class index.
std::vector<NeuronAssignment> assign_neurons(const MlpModel& model);

/// Heatmap column order: neurons grouped by assigned class (class-name
/// order), descending assignment weight within a class.
std::vector<std::size_t> sort_neurons_for_display(const MlpModel& model);

/// Profile of the k neurons with the highest output weight toward the
/// class, whatever their argmax assignment.
FeatureProfile top_k_profile(const MlpModel& model, int class_index, std::size_t k = 10);

/// mean(weight_mean over high window) - mean(weight_mean over low window);
/// positive means the network up-weights the high window.
double contrast_score(const FeatureProfile& profile, const WavelengthGrid& grid,
                      BandWindow low_window, BandWindow high_window);

/// For every class pair, scans 512 through-origin lines (slopes tan(theta),
/// theta uniform in (0, pi/2)) in the plane of the two bands nearest
/// red_nm/nir_nm and reports the best 0-1 separation per pair.
SeparabilityReport ndvi_geometry_check(const std::vector<int>& labels,
                                       const Matrix& spectra,
                                       const WavelengthGrid& grid, double red_nm,
                                       double nir_nm);

/// CSV with header exactly
/// "wavelength_nm,class_mean_reflectance,weight_mean,weight_std".
void export_profile_csv(const FeatureProfile& profile,
                        std::span<const double> class_mean_spectrum,
                        const WavelengthGrid& grid, const std::string& path);

} // namespace hsi
