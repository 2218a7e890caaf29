#include "hsi/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hsi/textio.hpp"

namespace hsi {

namespace {

void write_ppm(const std::vector<Rgb>& pixels, std::size_t width, std::size_t height,
               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write image file '" + path + "'");
    out << "P6\n" << width << " " << height << "\n255\n";
    for (const auto& px : pixels) {
        const char bytes[3] = {static_cast<char>(px.r), static_cast<char>(px.g),
                               static_cast<char>(px.b)};
        out.write(bytes, 3);
    }
    if (!out) throw Error("write failed for '" + path + "'");
}

} // namespace

Palette Palette::default_for(std::size_t n_classes) {
    // Blue, green, red first (vegetation map convention), then a fixed
    // distinct cycle. None of these equal the sentinel color.
    static const std::vector<Rgb> table = {
        {0, 0, 255},    {0, 255, 0},    {255, 0, 0},   {255, 255, 0},
        {0, 255, 255},  {255, 128, 0},  {128, 0, 255}, {0, 128, 128},
        {128, 128, 0},  {255, 160, 200}, {96, 64, 32},  {160, 255, 160},
        {64, 64, 255},  {192, 0, 96},   {0, 160, 64},  {128, 128, 128},
    };
    if (n_classes > table.size())
        throw Error("palette: no default colors for " + std::to_string(n_classes) +
                    " classes (max " + std::to_string(table.size()) + ")");
    Palette p;
    p.class_colors.assign(table.begin(),
                          table.begin() + static_cast<std::ptrdiff_t>(n_classes));
    p.validate();
    return p;
}

void Palette::validate() const {
    if (class_colors.empty()) throw Error("palette: no class colors");
    for (std::size_t i = 0; i < class_colors.size(); ++i) {
        if (class_colors[i] == sentinel)
            throw Error("palette: class " + std::to_string(i) +
                        " uses the sentinel color");
        for (std::size_t j = i + 1; j < class_colors.size(); ++j)
            if (class_colors[i] == class_colors[j])
                throw Error("palette: classes " + std::to_string(i) + " and " +
                            std::to_string(j) + " share a color");
    }
}

void write_class_map(const std::vector<int>& labels, std::size_t lines,
                     std::size_t samples, const Palette& palette,
                     const std::string& path) {
    palette.validate();
    if (labels.size() != lines * samples)
        throw Error("write_class_map: " + std::to_string(labels.size()) +
                    " labels for " + std::to_string(lines) + "x" +
                    std::to_string(samples) + " raster");
    std::vector<Rgb> pixels(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int l = labels[i];
        if (l < 0) {
            pixels[i] = palette.sentinel;
        } else {
            if (static_cast<std::size_t>(l) >= palette.class_colors.size())
                throw Error("write_class_map: label " + std::to_string(l) +
                            " outside palette of " +
                            std::to_string(palette.class_colors.size()) + " colors");
            pixels[i] = palette.class_colors[static_cast<std::size_t>(l)];
        }
    }
    write_ppm(pixels, samples, lines, path);
}

void write_weight_heatmap(const Matrix& w1,
                          const std::vector<std::size_t>& neuron_order,
                          const std::string& path) {
    if (w1.empty()) throw Error("write_weight_heatmap: empty weight matrix");
    if (neuron_order.size() != w1.cols())
        throw Error("write_weight_heatmap: order has " +
                    std::to_string(neuron_order.size()) + " entries for " +
                    std::to_string(w1.cols()) + " neurons");
    std::vector<bool> seen(w1.cols(), false);
    for (std::size_t j : neuron_order) {
        if (j >= w1.cols() || seen[j])
            throw Error("write_weight_heatmap: order is not a permutation");
        seen[j] = true;
    }

    double lo = w1.data()[0], hi = w1.data()[0];
    for (std::size_t i = 0; i < w1.size(); ++i) {
        lo = std::min(lo, w1.data()[i]);
        hi = std::max(hi, w1.data()[i]);
    }
    const double range = hi - lo;

    std::vector<Rgb> pixels(w1.rows() * w1.cols());
    for (std::size_t b = 0; b < w1.rows(); ++b)
        for (std::size_t j = 0; j < w1.cols(); ++j) {
            std::uint8_t g = 128;
            if (range > 0.0) {
                const double t = (w1(b, neuron_order[j]) - lo) / range;
                g = static_cast<std::uint8_t>(std::lround(t * 255.0));
            }
            pixels[b * w1.cols() + j] = {g, g, g};
        }
    write_ppm(pixels, w1.cols(), w1.rows(), path);
}

void write_index_map(const std::vector<double>& values, std::size_t lines,
                     std::size_t samples, const std::string& path) {
    if (values.size() != lines * samples)
        throw Error("write_index_map: " + std::to_string(values.size()) +
                    " values for " + std::to_string(lines) + "x" +
                    std::to_string(samples) + " raster");
    std::vector<Rgb> pixels(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (std::isnan(v)) {
            pixels[i] = {255, 0, 255};
        } else {
            const double t = std::clamp((v + 1.0) / 2.0, 0.0, 1.0);
            const auto g = static_cast<std::uint8_t>(std::lround(t * 255.0));
            pixels[i] = {g, g, g};
        }
    }
    write_ppm(pixels, samples, lines, path);
}

void export_scatter_csv(const Matrix& spectra, const std::vector<int>& labels,
                        const std::vector<std::string>& class_names,
                        const WavelengthGrid& grid, double x_nm, double y_nm,
                        const std::string& path) {
    if (labels.size() != spectra.rows())
        throw Error("export_scatter_csv: label/spectra count mismatch");
    if (spectra.cols() != grid.size())
        throw Error("export_scatter_csv: spectra/grid band mismatch");
    const std::size_t xb = nearest_band(grid, x_nm);
    const std::size_t yb = nearest_band(grid, y_nm);
    std::ofstream out(path);
    if (!out) throw Error("cannot write scatter file '" + path + "'");
    out << "x_reflectance,y_reflectance,label\n";
    for (std::size_t i = 0; i < spectra.rows(); ++i) {
        const int l = labels[i];
        if (l < 0 || static_cast<std::size_t>(l) >= class_names.size())
            throw Error("export_scatter_csv: label " + std::to_string(l) +
                        " has no class name");
        out << format_double(spectra(i, xb)) << ',' << format_double(spectra(i, yb))
            << ',' << class_names[static_cast<std::size_t>(l)] << '\n';
    }
    if (!out) throw Error("write failed for '" + path + "'");
}

} // namespace hsi
