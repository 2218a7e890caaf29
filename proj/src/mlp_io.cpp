#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hsi/mlp.hpp"

namespace hsi {

namespace {

// Little-endian binary container, version-tagged. Layout:
//   magic "HSMLPv1\n"
//   u64 bands, hidden, classes
//   f64 wavelengths[bands]
//   classes x { u64 length, bytes } class names
//   f64 w1[bands*hidden], b1[hidden], w2[hidden*classes], b2[classes]
constexpr char kMagic[8] = {'H', 'S', 'M', 'L', 'P', 'v', '1', '\n'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
    put_u64(out, std::bit_cast<std::uint64_t>(d));
}

class Reader {
public:
    Reader(const std::string& bytes, const std::string& path)
        : b_(bytes), path_(path) {}

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(
                     static_cast<unsigned char>(b_[pos_ + static_cast<std::size_t>(i)]))
                 << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(std::size_t n) {
        need(n);
        std::string s = b_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    void expect_end() const {
        if (pos_ != b_.size())
            throw Error(path_ + ": trailing bytes after model payload");
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > b_.size())
            throw Error(path_ + ": truncated model file");
    }
    const std::string& b_;
    std::string path_;
    std::size_t pos_ = 0;
};

} // namespace

void save_model(const MlpModel& model, const std::string& path) {
    model.validate();
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_u64(out, model.bands());
    put_u64(out, model.hidden_units());
    put_u64(out, model.class_count());
    for (std::size_t b = 0; b < model.bands(); ++b) put_f64(out, model.grid[b]);
    for (const auto& name : model.class_names) {
        put_u64(out, name.size());
        out.append(name);
    }
    for (std::size_t i = 0; i < model.w1.size(); ++i) put_f64(out, model.w1.data()[i]);
    for (double v : model.b1) put_f64(out, v);
    for (std::size_t i = 0; i < model.w2.size(); ++i) put_f64(out, model.w2.data()[i]);
    for (double v : model.b2) put_f64(out, v);

    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write model file '" + path + "'");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("write failed for '" + path + "'");
}

MlpModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open model file '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
    Reader r(bytes, path);
    if (r.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
        throw Error(path + ": not a model file (bad magic/version)");

    const std::uint64_t bands = r.u64();
    const std::uint64_t hidden = r.u64();
    const std::uint64_t classes = r.u64();
    if (bands == 0 || hidden == 0 || classes == 0)
        throw Error(path + ": model declares a zero dimension");

    std::vector<double> wl(bands);
    for (auto& w : wl) w = r.f64();

    MlpModel m;
    m.grid = WavelengthGrid(std::move(wl));
    m.class_names.reserve(classes);
    for (std::uint64_t c = 0; c < classes; ++c) {
        const std::uint64_t len = r.u64();
        if (len > 4096) throw Error(path + ": implausible class-name length");
        m.class_names.push_back(r.str(len));
    }
    m.w1 = Matrix(bands, hidden);
    for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = r.f64();
    m.b1.resize(hidden);
    for (double& v : m.b1) v = r.f64();
    m.w2 = Matrix(hidden, classes);
    for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = r.f64();
    m.b2.resize(classes);
    for (double& v : m.b2) v = r.f64();
    r.expect_end();
    m.validate();
    return m;
}

} // namespace hsi
