#include <fstream>
#include <sstream>

#include "hsi/spectra_io.hpp"
#include "hsi/textio.hpp"

namespace hsi {

LabeledDataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file '" + path + "'");

    std::string line;
    if (!std::getline(in, line) || trim(line).empty())
        throw Error(path + ": empty dataset (no header row)");
    auto header = split(trim(line), ',');
    if (header.size() < 2 || lower(trim(header.back())) != "label")
        throw Error(path + ": header must be wavelengths followed by a 'label' column");
    std::vector<double> wl;
    wl.reserve(header.size() - 1);
    for (std::size_t i = 0; i + 1 < header.size(); ++i)
        wl.push_back(parse_double(header[i], "header wavelength"));

    LabeledDataset ds;
    ds.grid = WavelengthGrid(std::move(wl));
    const std::size_t bands = ds.grid.size();

    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto fields = split(t, ',');
        if (fields.size() != bands + 1)
            throw Error(path + ": line " + std::to_string(lineno) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(bands + 1));
        for (std::size_t b = 0; b < bands; ++b)
            values.push_back(parse_double(fields[b], "reflectance"));
        const std::string name(trim(fields.back()));
        if (name.empty())
            throw Error(path + ": line " + std::to_string(lineno) + " has an empty label");
        int label = -1;
        for (std::size_t c = 0; c < ds.class_names.size(); ++c)
            if (ds.class_names[c] == name) label = static_cast<int>(c);
        if (label < 0) {
            label = static_cast<int>(ds.class_names.size());
            ds.class_names.push_back(name);
        }
        ds.labels.push_back(label);
    }
    if (ds.labels.empty()) throw Error(path + ": empty dataset (header only)");

    ds.spectra = Matrix(ds.labels.size(), bands);
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        for (std::size_t b = 0; b < bands; ++b)
            ds.spectra(i, b) = values[i * bands + b];
    ds.validate();
    return ds;
}

void save_dataset_csv(const LabeledDataset& ds, const std::string& path) {
    ds.validate(false);
    std::ofstream out(path);
    if (!out) throw Error("cannot write dataset file '" + path + "'");
    std::string buf;
    for (std::size_t b = 0; b < ds.bands(); ++b) {
        buf += format_double(ds.grid[b]);
        buf += ',';
    }
    buf += "label\n";
    out << buf;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        buf.clear();
        const auto row = ds.spectra.row(i);
        for (std::size_t b = 0; b < ds.bands(); ++b) {
            buf += format_double(row[b]);
            buf += ',';
        }
        buf += ds.class_names[static_cast<std::size_t>(ds.labels[i])];
        buf += '\n';
        out << buf;
    }
    if (!out) throw Error("write failed for '" + path + "'");
}

} // namespace hsi
