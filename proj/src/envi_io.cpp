#include <bit>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "hsi/spectra_io.hpp"
#include "hsi/textio.hpp"

namespace hsi {

namespace {

// Header text -> lowercase key / raw value map. Values in { } may span
// multiple lines (ENVI wavelength lists usually do).
std::map<std::string, std::string> parse_header_text(const std::string& text,
                                                     const std::string& path) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || lower(t) == "envi") continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw Error(path + ": malformed header line '" + std::string(t) + "'");
        std::string key = lower(trim(t.substr(0, eq)));
        std::string value(trim(t.substr(eq + 1)));
        if (!value.empty() && value.front() == '{') {
            while (value.find('}') == std::string::npos) {
                if (!std::getline(in, line))
                    throw Error(path + ": unterminated { } block for key '" + key + "'");
                value += ' ';
                value += std::string(trim(line));
            }
            value = value.substr(1, value.find('}') - 1);
        }
        if (kv.count(key))
            throw Error(path + ": duplicate header key '" + key + "'");
        kv[key] = std::string(trim(value));
    }
    return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv,
                           const std::string& key, const std::string& path) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(path + ": missing header key '" + key + "'");
    return it->second;
}

float float_from_bytes(const unsigned char* p, bool big_endian) {
    std::uint32_t u;
    if (big_endian)
        u = (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
            (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
    else
        u = (std::uint32_t(p[3]) << 24) | (std::uint32_t(p[2]) << 16) |
            (std::uint32_t(p[1]) << 8) | std::uint32_t(p[0]);
    return std::bit_cast<float>(u);
}

void float_to_bytes(float v, bool big_endian, unsigned char* p) {
    const auto u = std::bit_cast<std::uint32_t>(v);
    if (big_endian) {
        p[0] = static_cast<unsigned char>(u >> 24);
        p[1] = static_cast<unsigned char>(u >> 16);
        p[2] = static_cast<unsigned char>(u >> 8);
        p[3] = static_cast<unsigned char>(u);
    } else {
        p[3] = static_cast<unsigned char>(u >> 24);
        p[2] = static_cast<unsigned char>(u >> 16);
        p[1] = static_cast<unsigned char>(u >> 8);
        p[0] = static_cast<unsigned char>(u);
    }
}

// Disk offset of (line, sample, band) for each interleave, in elements.
std::size_t disk_index(Interleave il, std::size_t l, std::size_t s, std::size_t b,
                       std::size_t lines, std::size_t samples, std::size_t bands) {
    switch (il) {
        case Interleave::bip: return (l * samples + s) * bands + b;
        case Interleave::bil: return (l * bands + b) * samples + s;
        case Interleave::bsq: return (b * lines + l) * samples + s;
    }
    return 0;
}

} // namespace

Interleave parse_interleave(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "bsq") return Interleave::bsq;
    if (t == "bil") return Interleave::bil;
    if (t == "bip") return Interleave::bip;
    throw Error("unknown interleave '" + t + "' (expected bsq, bil or bip)");
}

std::string_view interleave_name(Interleave il) {
    switch (il) {
        case Interleave::bsq: return "bsq";
        case Interleave::bil: return "bil";
        case Interleave::bip: return "bip";
    }
    return "bsq";
}

SpectralCube load_cube(const std::string& raster_path, const std::string& header_path) {
    std::ifstream hf(header_path);
    if (!hf) throw Error("cannot open header file '" + header_path + "'");
    std::stringstream hbuf;
    hbuf << hf.rdbuf();
    const auto kv = parse_header_text(hbuf.str(), header_path);

    const std::size_t samples = parse_size(require(kv, "samples", header_path), "samples");
    const std::size_t lines = parse_size(require(kv, "lines", header_path), "lines");
    const std::size_t bands = parse_size(require(kv, "bands", header_path), "bands");
    if (samples == 0 || lines == 0 || bands == 0)
        throw Error(header_path + ": samples, lines and bands must all be nonzero");

    const std::size_t dtype = parse_size(require(kv, "data type", header_path), "data type");
    if (dtype != 4)
        throw Error(header_path + ": unsupported data type " + std::to_string(dtype) +
                    " (only 4 = 32-bit float is supported)");
    const std::size_t byte_order = parse_size(require(kv, "byte order", header_path), "byte order");
    if (byte_order > 1)
        throw Error(header_path + ": byte order must be 0 (little) or 1 (big)");
    const Interleave il = parse_interleave(require(kv, "interleave", header_path));

    const auto wl_fields = split(require(kv, "wavelength", header_path), ',');
    std::vector<double> wl;
    wl.reserve(wl_fields.size());
    for (const auto& f : wl_fields)
        wl.push_back(parse_double(f, "wavelength"));
    if (wl.size() != bands)
        throw Error(header_path + ": header declares " + std::to_string(bands) +
                    " bands but lists " + std::to_string(wl.size()) + " wavelengths");
    bool all_small = true;
    for (double w : wl)
        if (w >= 100.0) all_small = false;
    if (all_small && !wl.empty()) {
        std::cerr << "warning: " << header_path
                  << ": wavelengths look like micrometers, converting to nm\n";
        for (double& w : wl) w *= 1000.0;
    }

    std::ifstream rf(raster_path, std::ios::binary);
    if (!rf) throw Error("cannot open raster file '" + raster_path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(rf)),
                                     std::istreambuf_iterator<char>());
    const std::size_t expected = lines * samples * bands * 4;
    if (bytes.size() != expected)
        throw Error(raster_path + ": raster is " + std::to_string(bytes.size()) +
                    " bytes, header implies " + std::to_string(expected));

    SpectralCube cube;
    cube.lines = lines;
    cube.samples = samples;
    cube.grid = WavelengthGrid(std::move(wl));
    cube.data.resize(lines * samples * bands);
    const bool big = byte_order == 1;
    for (std::size_t l = 0; l < lines; ++l)
        for (std::size_t s = 0; s < samples; ++s)
            for (std::size_t b = 0; b < bands; ++b) {
                const std::size_t src = disk_index(il, l, s, b, lines, samples, bands);
                cube.data[(l * samples + s) * bands + b] =
                    float_from_bytes(bytes.data() + src * 4, big);
            }
    return cube;
}

void save_cube(const SpectralCube& cube, const std::string& raster_path,
               const std::string& header_path, Interleave il, int byte_order) {
    cube.validate();
    if (byte_order != 0 && byte_order != 1)
        throw Error("save_cube: byte order must be 0 or 1");

    const std::size_t lines = cube.lines, samples = cube.samples, bands = cube.bands();
    std::vector<unsigned char> bytes(lines * samples * bands * 4);
    const bool big = byte_order == 1;
    for (std::size_t l = 0; l < lines; ++l)
        for (std::size_t s = 0; s < samples; ++s)
            for (std::size_t b = 0; b < bands; ++b) {
                const std::size_t dst = disk_index(il, l, s, b, lines, samples, bands);
                float_to_bytes(cube.data[(l * samples + s) * bands + b], big,
                               bytes.data() + dst * 4);
            }

    std::ofstream rf(raster_path, std::ios::binary);
    if (!rf) throw Error("cannot write raster file '" + raster_path + "'");
    rf.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!rf) throw Error("write failed for '" + raster_path + "'");

    std::ofstream hf(header_path);
    if (!hf) throw Error("cannot write header file '" + header_path + "'");
    hf << "ENVI\n";
    hf << "samples = " << samples << "\n";
    hf << "lines = " << lines << "\n";
    hf << "bands = " << bands << "\n";
    hf << "data type = 4\n";
    hf << "interleave = " << interleave_name(il) << "\n";
    hf << "byte order = " << byte_order << "\n";
    hf << "wavelength = { ";
    for (std::size_t b = 0; b < bands; ++b) {
        if (b) hf << ", ";
        hf << format_double(cube.grid[b]);
    }
    hf << " }\n";
    if (!hf) throw Error("write failed for '" + header_path + "'");
}

} // namespace hsi
