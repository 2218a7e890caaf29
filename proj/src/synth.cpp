#include "hsi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "hsi/rng.hpp"

namespace hsi {

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double piecewise_linear(const std::vector<std::pair<double, double>>& knots, double x) {
    if (knots.empty()) return 0.0;
    if (x <= knots.front().first) return knots.front().second;
    if (x >= knots.back().first) return knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (x <= knots[i].first) {
            const auto [x0, y0] = knots[i - 1];
            const auto [x1, y1] = knots[i];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    return knots.back().second;
}

WavelengthGrid uniform_grid(double lo_nm, double hi_nm, std::size_t bands) {
    std::vector<double> wl(bands);
    for (std::size_t i = 0; i < bands; ++i)
        wl[i] = lo_nm + (hi_nm - lo_nm) * static_cast<double>(i) /
                            static_cast<double>(bands - 1);
    return WavelengthGrid(std::move(wl));
}

double clip_reflectance(double v) { return std::clamp(v, 0.0, 1.2); }

} // namespace

double MaterialModel::reflectance_at(double nm) const {
    double v = piecewise_linear(baseline, nm);
    if (red_edge) {
        const auto& e = *red_edge;
        v += e.low + (e.high - e.low) * logistic((nm - e.center_nm) / e.width_nm);
    }
    for (const auto& dip : absorptions) {
        const double t = (nm - dip.center_nm) / dip.width_nm;
        v -= dip.depth * std::exp(-0.5 * t * t);
    }
    return v;
}

void MaterialModel::validate() const {
    if (name.empty()) throw Error("material: name must not be empty");
    for (std::size_t i = 1; i < baseline.size(); ++i)
        if (!(baseline[i].first > baseline[i - 1].first))
            throw Error("material '" + name + "': baseline knots must be increasing in nm");
    if (red_edge && !(red_edge->width_nm > 0.0))
        throw Error("material '" + name + "': sigmoid width must be positive");
    for (const auto& dip : absorptions) {
        if (dip.depth < 0.0)
            throw Error("material '" + name + "': dip depth must be >= 0");
        if (!(dip.width_nm > 0.0))
            throw Error("material '" + name + "': dip width must be positive");
    }
    if (noise_std < 0.0)
        throw Error("material '" + name + "': noise_std must be >= 0");
}

WavelengthGrid vegetation_grid() { return uniform_grid(400.0, 2400.0, 181); }
WavelengthGrid polymer_grid() { return uniform_grid(400.0, 2450.0, 452); }

std::vector<MaterialModel> vegetation_preset() {
    std::vector<MaterialModel> m(3);

    m[0].name = "forest";
    m[0].baseline = {{400, 0.025}, {550, 0.06}, {650, 0.04},  {700, 0.045},
                     {1300, 0.06}, {1450, 0.04}, {1900, 0.03}, {2400, 0.02}};
    m[0].red_edge = SigmoidEdge{715.0, 15.0, 0.0, 0.46};

    m[1].name = "field1";
    m[1].baseline = {{400, 0.04},  {550, 0.11}, {650, 0.075}, {700, 0.08},
                     {1300, 0.09}, {1450, 0.06}, {1900, 0.045}, {2400, 0.035}};
    m[1].red_edge = SigmoidEdge{715.0, 18.0, 0.0, 0.26};

    m[2].name = "field2_senesced";
    m[2].baseline = {{400, 0.08},  {550, 0.15}, {680, 0.21},  {900, 0.26},
                     {1300, 0.28}, {1450, 0.22}, {1900, 0.18}, {2400, 0.15}};
    m[2].red_edge = SigmoidEdge{715.0, 40.0, 0.0, 0.06};

    return m;
}

std::vector<std::size_t> vegetation_counts() { return {2580, 168, 104}; }

std::vector<MaterialModel> polymer_preset() {
    std::vector<MaterialModel> m(10);

    m[0].name = "red_bubble_wrap";
    m[0].baseline = {{400, 0.06}, {1000, 0.10}, {2450, 0.08}};
    m[0].red_edge = SigmoidEdge{600.0, 12.0, 0.0, 0.48};
    m[0].absorptions = {{1215, 0.12, 25}, {1730, 0.18, 30}, {2310, 0.20, 40}};

    m[1].name = "clear_bubble_wrap";
    m[1].baseline = {{400, 0.55}, {2450, 0.50}};
    m[1].absorptions = {{1215, 0.10, 25}, {1730, 0.15, 30}, {2310, 0.18, 40}};

    m[2].name = "glove_loc";
    m[2].baseline = {{400, 0.35}, {2450, 0.30}};
    m[2].absorptions = {{1190, 0.08, 30}, {1440, 0.12, 45}, {2250, 0.10, 35}};

    m[3].name = "medicine_bottle";
    m[3].baseline = {{400, 0.05}, {2450, 0.12}};
    m[3].red_edge = SigmoidEdge{550.0, 25.0, 0.0, 0.25};
    m[3].absorptions = {{1215, 0.10, 25}, {1395, 0.08, 30}, {1730, 0.14, 30}, {2310, 0.15, 40}};

    m[4].name = "red_lid";
    m[4].baseline = {{400, 0.04}, {2450, 0.10}};
    m[4].red_edge = SigmoidEdge{605.0, 10.0, 0.0, 0.55};
    m[4].absorptions = {{1195, 0.10, 28}, {1690, 0.12, 30}, {2355, 0.14, 35}};

    m[5].name = "ping_pong_ball";
    m[5].baseline = {{400, 0.75}, {2450, 0.65}};
    m[5].absorptions = {{1140, 0.10, 30}, {1660, 0.12, 30}, {2270, 0.14, 40}};

    m[6].name = "pvc_pipe";
    m[6].baseline = {{400, 0.63}, {2450, 0.58}};
    m[6].absorptions = {{1180, 0.09, 25}, {1420, 0.11, 35}, {1716, 0.16, 28}, {2140, 0.12, 40}};

    m[7].name = "pvc_extension_plug";
    m[7].baseline = {{400, 0.08}, {2450, 0.30}};
    m[7].red_edge = SigmoidEdge{585.0, 15.0, 0.0, 0.35};
    m[7].absorptions = {{1180, 0.09, 25}, {1420, 0.10, 35}, {1716, 0.15, 28}, {2140, 0.11, 40}};

    m[8].name = "inflatable_football";
    m[8].baseline = {{400, 0.20}, {900, 0.35}, {2450, 0.25}};
    m[8].absorptions = {{1195, 0.07, 30}, {1540, 0.10, 35}, {2300, 0.12, 45}};

    m[9].name = "foam_packaging";
    m[9].baseline = {{400, 0.85}, {2450, 0.72}};
    m[9].absorptions = {{1145, 0.06, 25}, {1680, 0.10, 30}, {2165, 0.08, 35}, {2305, 0.10, 30}};

    return m;
}

std::vector<std::size_t> polymer_counts() {
    return {3672, 3003, 1200, 1360, 2958, 225, 5415, 1818, 3196, 8900};
}

LabeledDataset generate_dataset(const std::vector<MaterialModel>& models,
                                const std::vector<std::size_t>& counts,
                                const WavelengthGrid& grid, std::uint64_t seed) {
    if (models.empty()) throw Error("generate_dataset: no materials");
    if (counts.size() != models.size())
        throw Error("generate_dataset: " + std::to_string(counts.size()) +
                    " counts for " + std::to_string(models.size()) + " materials");
    for (std::size_t c : counts)
        if (c < 1) throw Error("generate_dataset: counts must be >= 1");
    for (const auto& m : models) m.validate();

    std::size_t total = 0;
    for (std::size_t c : counts) total += c;

    LabeledDataset ds;
    ds.grid = grid;
    ds.spectra = Matrix(total, grid.size());
    ds.labels.reserve(total);
    for (const auto& m : models) ds.class_names.push_back(m.name);

    // Evaluate each analytic curve once; only the noise varies per sample.
    Rng rng(seed);
    std::vector<double> curve(grid.size());
    std::size_t row = 0;
    for (std::size_t c = 0; c < models.size(); ++c) {
        for (std::size_t b = 0; b < grid.size(); ++b)
            curve[b] = models[c].reflectance_at(grid[b]);
        for (std::size_t i = 0; i < counts[c]; ++i) {
            auto dst = ds.spectra.row(row);
            for (std::size_t b = 0; b < grid.size(); ++b)
                dst[b] = clip_reflectance(curve[b] +
                                          rng.normal(0.0, models[c].noise_std));
            ds.labels.push_back(static_cast<int>(c));
            ++row;
        }
    }
    return ds;
}

Scene striped_scene(std::size_t lines, std::size_t samples, std::size_t n_materials) {
    if (lines < n_materials)
        throw Error("striped_scene: need at least one line per material");
    Scene scene;
    scene.lines = lines;
    scene.samples = samples;
    for (std::size_t i = 0; i < n_materials; ++i) {
        const std::size_t first = i * lines / n_materials;
        const std::size_t last = (i + 1) * lines / n_materials - 1;
        scene.regions.push_back({first, last, 0, samples - 1, i});
    }
    return scene;
}

std::pair<SpectralCube, std::vector<int>> generate_cube(
    const Scene& scene, const std::vector<MaterialModel>& models,
    const WavelengthGrid& grid, std::uint64_t seed) {
    if (scene.lines == 0 || scene.samples == 0)
        throw Error("generate_cube: empty scene extent");
    for (const auto& r : scene.regions) {
        if (r.line_last >= scene.lines || r.sample_last >= scene.samples ||
            r.line_first > r.line_last || r.sample_first > r.sample_last)
            throw Error("generate_cube: region out of scene bounds");
        if (r.material >= models.size())
            throw Error("generate_cube: region references material " +
                        std::to_string(r.material) + " of " +
                        std::to_string(models.size()));
    }
    for (const auto& m : models) m.validate();

    // Region lookup per pixel; first listed region wins on overlap.
    std::vector<int> label_map(scene.lines * scene.samples, -1);
    for (std::size_t ri = scene.regions.size(); ri > 0; --ri) {
        const auto& r = scene.regions[ri - 1];
        for (std::size_t l = r.line_first; l <= r.line_last; ++l)
            for (std::size_t s = r.sample_first; s <= r.sample_last; ++s)
                label_map[l * scene.samples + s] = static_cast<int>(r.material);
    }
    for (std::size_t i = 0; i < label_map.size(); ++i)
        if (label_map[i] < 0)
            throw Error("generate_cube: pixel (" + std::to_string(i / scene.samples) +
                        ", " + std::to_string(i % scene.samples) +
                        ") is not covered by any region");

    std::vector<std::vector<double>> curves(models.size(),
                                            std::vector<double>(grid.size()));
    for (std::size_t c = 0; c < models.size(); ++c)
        for (std::size_t b = 0; b < grid.size(); ++b)
            curves[c][b] = models[c].reflectance_at(grid[b]);

    SpectralCube cube;
    cube.lines = scene.lines;
    cube.samples = scene.samples;
    cube.grid = grid;
    cube.data.resize(scene.lines * scene.samples * grid.size());
    Rng rng(seed);
    for (std::size_t p = 0; p < label_map.size(); ++p) {
        const auto c = static_cast<std::size_t>(label_map[p]);
        float* dst = cube.data.data() + p * grid.size();
        for (std::size_t b = 0; b < grid.size(); ++b)
            dst[b] = static_cast<float>(clip_reflectance(
                curves[c][b] + rng.normal(0.0, models[c].noise_std)));
    }
    return {std::move(cube), std::move(label_map)};
}

void save_materials(const std::vector<MaterialModel>& models, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : models) {
        m.validate();
        nlohmann::json j;
        j["name"] = m.name;
        j["baseline"] = nlohmann::json::array();
        for (const auto& [nm, v] : m.baseline) j["baseline"].push_back({nm, v});
        if (m.red_edge)
            j["red_edge"] = {{"center_nm", m.red_edge->center_nm},
                             {"width_nm", m.red_edge->width_nm},
                             {"low", m.red_edge->low},
                             {"high", m.red_edge->high}};
        j["absorptions"] = nlohmann::json::array();
        for (const auto& d : m.absorptions)
            j["absorptions"].push_back({{"center_nm", d.center_nm},
                                        {"depth", d.depth},
                                        {"width_nm", d.width_nm}});
        j["noise_std"] = m.noise_std;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write materials file '" + path + "'");
    out << arr.dump(2) << "\n";
    if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<MaterialModel> load_materials(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open materials file '" + path + "'");
    try {
        nlohmann::json arr;
        in >> arr;
        std::vector<MaterialModel> models;
        for (const auto& j : arr) {
            MaterialModel m;
            m.name = j.at("name").get<std::string>();
            for (const auto& knot : j.at("baseline"))
                m.baseline.emplace_back(knot.at(0).get<double>(), knot.at(1).get<double>());
            if (j.contains("red_edge")) {
                const auto& e = j["red_edge"];
                m.red_edge = SigmoidEdge{e.at("center_nm").get<double>(),
                                         e.at("width_nm").get<double>(),
                                         e.at("low").get<double>(),
                                         e.at("high").get<double>()};
            }
            if (j.contains("absorptions"))
                for (const auto& d : j["absorptions"])
                    m.absorptions.push_back({d.at("center_nm").get<double>(),
                                             d.at("depth").get<double>(),
                                             d.at("width_nm").get<double>()});
            m.noise_std = j.value("noise_std", 0.01);
            m.validate();
            models.push_back(std::move(m));
        }
        if (models.empty()) throw Error(path + ": no materials in file");
        return models;
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": invalid materials file: " + e.what());
    }
}

} // namespace hsi
