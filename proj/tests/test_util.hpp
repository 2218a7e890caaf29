#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "hsi/matrix.hpp"
#include "hsi/spectra_io.hpp"

namespace hsitest {

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("hsi_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

/// Tiny dataset builder: rows of (spectrum..., class index).
inline hsi::LabeledDataset make_dataset(const std::vector<double>& wavelengths,
                                        const std::vector<std::vector<double>>& rows,
                                        const std::vector<int>& labels,
                                        const std::vector<std::string>& names) {
    hsi::LabeledDataset ds;
    ds.grid = hsi::WavelengthGrid(wavelengths);
    ds.spectra = hsi::Matrix(rows.size(), wavelengths.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t b = 0; b < wavelengths.size(); ++b)
            ds.spectra(i, b) = rows[i][b];
    ds.labels = labels;
    ds.class_names = names;
    return ds;
}

} // namespace hsitest
