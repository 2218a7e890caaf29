#include "hsi/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hsi/textio.hpp"

namespace hsi {

std::vector<NeuronAssignment> assign_neurons(const MlpModel& model) {
    model.validate();
    std::vector<NeuronAssignment> out;
    out.reserve(model.hidden_units());
    for (std::size_t j = 0; j < model.hidden_units(); ++j) {
        const auto row = model.w2.row(j);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c)
            if (row[c] > row[best]) best = c;
        out.push_back({j, static_cast<int>(best), row[best]});
    }
    return out;
}

std::vector<std::size_t> sort_neurons_for_display(const MlpModel& model) {
    const auto assignments = assign_neurons(model);
    std::vector<std::size_t> order(assignments.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (assignments[a].assigned_class != assignments[b].assigned_class)
                             return assignments[a].assigned_class <
                                    assignments[b].assigned_class;
                         return assignments[a].assignment_weight >
                                assignments[b].assignment_weight;
                     });
    return order;
}

FeatureProfile top_k_profile(const MlpModel& model, int class_index, std::size_t k) {
    model.validate();
    if (class_index < 0 || static_cast<std::size_t>(class_index) >= model.class_count())
        throw Error("top_k_profile: class index " + std::to_string(class_index) +
                    " out of range");
    if (k < 1) throw Error("top_k_profile: k must be >= 1");
    if (k > model.hidden_units())
        throw Error("top_k_profile: k = " + std::to_string(k) + " exceeds " +
                    std::to_string(model.hidden_units()) + " hidden neurons");

    const auto c = static_cast<std::size_t>(class_index);
    std::vector<std::size_t> order(model.hidden_units());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.w2(a, c) > model.w2(b, c);
    });
    order.resize(k);

    FeatureProfile p;
    p.class_index = class_index;
    p.neuron_indices = order;
    p.weight_mean.assign(model.bands(), 0.0);
    p.weight_std.assign(model.bands(), 0.0);
    for (std::size_t b = 0; b < model.bands(); ++b) {
        double sum = 0.0;
        for (std::size_t j : order) sum += model.w1(b, j);
        const double mean = sum / static_cast<double>(k);
        double sq = 0.0;
        for (std::size_t j : order) {
            const double d = model.w1(b, j) - mean;
            sq += d * d;
        }
        p.weight_mean[b] = mean;
        p.weight_std[b] = std::sqrt(sq / static_cast<double>(k));
    }
    return p;
}

double contrast_score(const FeatureProfile& profile, const WavelengthGrid& grid,
                      BandWindow low_window, BandWindow high_window) {
    if (profile.weight_mean.size() != grid.size())
        throw Error("contrast_score: profile has " +
                    std::to_string(profile.weight_mean.size()) + " bands, grid has " +
                    std::to_string(grid.size()));
    auto window_mean = [&](BandWindow w) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t b = 0; b < grid.size(); ++b)
            if (grid[b] >= w.lo_nm && grid[b] <= w.hi_nm) {
                sum += profile.weight_mean[b];
                ++n;
            }
        if (n == 0)
            throw Error("contrast_score: window [" + format_double(w.lo_nm) + ", " +
                        format_double(w.hi_nm) + "] contains no grid band");
        return sum / static_cast<double>(n);
    };
    return window_mean(high_window) - window_mean(low_window);
}

SeparabilityReport ndvi_geometry_check(const std::vector<int>& labels,
                                       const Matrix& spectra,
                                       const WavelengthGrid& grid, double red_nm,
                                       double nir_nm) {
    if (labels.size() != spectra.rows())
        throw Error("ndvi_geometry_check: " + std::to_string(labels.size()) +
                    " labels vs " + std::to_string(spectra.rows()) + " spectra");
    if (spectra.cols() != grid.size())
        throw Error("ndvi_geometry_check: spectra/grid band mismatch");

    SeparabilityReport report;
    report.red_band = nearest_band(grid, red_nm);
    report.nir_band = nearest_band(grid, nir_nm);

    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    if (max_label < 0) return report;
    const auto n_classes = static_cast<std::size_t>(max_label) + 1;

    std::vector<std::vector<std::pair<double, double>>> points(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i)
        points[static_cast<std::size_t>(labels[i])].emplace_back(
            spectra(i, report.red_band), spectra(i, report.nir_band));

    constexpr std::size_t kAngles = 512;
    constexpr double kPi = 3.14159265358979323846;
    for (std::size_t a = 0; a < n_classes; ++a) {
        for (std::size_t b = a + 1; b < n_classes; ++b) {
            if (points[a].empty() || points[b].empty()) continue;
            double peak = 0.0;
            for (const auto& [r, nir] : points[a]) peak = std::max({peak, std::abs(r), std::abs(nir)});
            for (const auto& [r, nir] : points[b]) peak = std::max({peak, std::abs(r), std::abs(nir)});
            if (peak == 0.0)
                throw Error("ndvi_geometry_check: all points project to the origin "
                            "for classes " + std::to_string(a) + "/" + std::to_string(b));

            const auto total = static_cast<double>(points[a].size() + points[b].size());
            PairSeparation best{static_cast<int>(a), static_cast<int>(b), -1.0, 0.0, 0.0};
            for (std::size_t t = 0; t < kAngles; ++t) {
                const double theta = (static_cast<double>(t) + 0.5) * (kPi / 2.0) /
                                     static_cast<double>(kAngles);
                const double slope = std::tan(theta);
                std::size_t a_above = 0, b_above = 0;
                for (const auto& [r, nir] : points[a])
                    if (nir > slope * r) ++a_above;
                for (const auto& [r, nir] : points[b])
                    if (nir > slope * r) ++b_above;
                // Either class may be the one above the line.
                const std::size_t correct = std::max(
                    a_above + (points[b].size() - b_above),
                    b_above + (points[a].size() - a_above));
                const double frac = static_cast<double>(correct) / total;
                if (frac > best.separation) {
                    best.separation = frac;
                    best.slope = slope;
                }
            }
            best.implied_ndvi = (best.slope - 1.0) / (best.slope + 1.0);
            report.pairs.push_back(best);
        }
    }
    return report;
}

void export_profile_csv(const FeatureProfile& profile,
                        std::span<const double> class_mean_spectrum,
                        const WavelengthGrid& grid, const std::string& path) {
    if (profile.weight_mean.size() != grid.size() ||
        class_mean_spectrum.size() != grid.size())
        throw Error("export_profile_csv: band count mismatch");
    std::ofstream out(path);
    if (!out) throw Error("cannot write profile file '" + path + "'");
    out << "wavelength_nm,class_mean_reflectance,weight_mean,weight_std\n";
    for (std::size_t b = 0; b < grid.size(); ++b) {
        out << format_double(grid[b]) << ',' << format_double(class_mean_spectrum[b])
            << ',' << format_double(profile.weight_mean[b]) << ','
            << format_double(profile.weight_std[b]) << '\n';
    }
    if (!out) throw Error("write failed for '" + path + "'");
}

} // namespace hsi
