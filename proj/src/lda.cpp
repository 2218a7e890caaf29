#include "hsi/lda.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace hsi {

namespace {

// In-place lower Cholesky; returns false on a nonpositive pivot (relative
// to the matrix scale), which is how singularity shows up here.
bool cholesky_lower(Matrix& a) {
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += a(i, i);
    scale = std::max(scale / static_cast<double>(n), 1e-300);
    const double tol = 1e-12 * scale;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > tol)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
        for (std::size_t k = j + 1; k < n; ++k) a(j, k) = 0.0;
    }
    return true;
}

// Solves L * L^T * x = b.
std::vector<double> chol_solve(const Matrix& l, std::span<const double> b) {
    const std::size_t n = l.rows();
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

void compute_discriminants(LdaModel& m) {
    const std::size_t nc = m.class_count(), nb = m.bands();
    m.discriminant_coef = Matrix(nc, nb);
    m.discriminant_const.assign(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto coef = chol_solve(m.chol_lower, m.class_means.row(c));
        double quad = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            m.discriminant_coef(c, b) = coef[b];
            quad += m.class_means(c, b) * coef[b];
        }
        m.discriminant_const[c] = -0.5 * quad + m.log_priors[c];
    }
}

} // namespace

LdaModel fit_lda(const LabeledDataset& ds, double shrinkage) {
    ds.validate();
    if (!(shrinkage >= 0.0 && shrinkage <= 1.0))
        throw Error("fit_lda: shrinkage must be in [0, 1]");
    if (ds.class_count() < 2)
        throw Error("fit_lda: need at least 2 classes");
    const std::size_t n = ds.size(), nb = ds.bands(), nc = ds.class_count();
    if (n <= nc)
        throw Error("fit_lda: need more samples than classes for a pooled covariance");

    LdaModel m;
    m.grid = ds.grid;
    m.class_names = ds.class_names;
    m.shrinkage = shrinkage;
    m.class_means = class_mean_spectra(ds);

    const auto counts = ds.class_counts();
    m.log_priors.resize(nc);
    for (std::size_t c = 0; c < nc; ++c)
        m.log_priors[c] = std::log(static_cast<double>(counts[c]) /
                                   static_cast<double>(n));

    // Pooled covariance from class-centered samples: Xc^T * Xc / (n - C).
    Matrix centered(n, nb);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = ds.spectra.row(i);
        const auto mean = m.class_means.row(static_cast<std::size_t>(ds.labels[i]));
        auto dst = centered.row(i);
        for (std::size_t b = 0; b < nb; ++b) dst[b] = row[b] - mean[b];
    }
    Matrix cov = matmul_ta(centered, centered);
    const double dof = static_cast<double>(n - nc);
    for (std::size_t i = 0; i < cov.size(); ++i) cov.data()[i] /= dof;

    double avg_var = 0.0;
    for (std::size_t b = 0; b < nb; ++b) avg_var += cov(b, b);
    avg_var /= static_cast<double>(nb);
    if (avg_var <= 0.0) avg_var = 1.0; // constant classes: fall back to unit target
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            cov(i, j) *= 1.0 - shrinkage;
            if (i == j) cov(i, j) += shrinkage * avg_var;
        }

    if (!cholesky_lower(cov))
        throw Error("fit_lda: regularized covariance is not positive definite "
                    "(rank-deficient classes?); increase shrinkage (--lda-shrinkage)");
    m.chol_lower = std::move(cov);
    compute_discriminants(m);
    return m;
}

std::vector<int> predict_lda(const LdaModel& m, const Matrix& x) {
    if (x.cols() != m.bands())
        throw Error("lda: input has " + std::to_string(x.cols()) +
                    " bands, model expects " + std::to_string(m.bands()));
    std::vector<int> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        std::size_t best = 0;
        double best_score = 0.0;
        for (std::size_t c = 0; c < m.class_count(); ++c) {
            double s = m.discriminant_const[c];
            const auto coef = m.discriminant_coef.row(c);
            for (std::size_t b = 0; b < row.size(); ++b) s += row[b] * coef[b];
            if (c == 0 || s > best_score) {
                best = c;
                best_score = s;
            }
        }
        out[i] = static_cast<int>(best);
    }
    return out;
}

double lda_accuracy(const LdaModel& m, const LabeledDataset& ds) {
    ds.validate(false);
    if (ds.size() == 0) throw Error("lda_accuracy: empty dataset");
    std::vector<int> remap(ds.class_count());
    for (std::size_t c = 0; c < ds.class_count(); ++c) {
        auto it = std::find(m.class_names.begin(), m.class_names.end(),
                            ds.class_names[c]);
        if (it == m.class_names.end())
            throw Error("lda_accuracy: dataset class '" + ds.class_names[c] +
                        "' unknown to the model");
        remap[c] = static_cast<int>(it - m.class_names.begin());
    }
    const auto pred = predict_lda(m, ds.spectra);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == remap[static_cast<std::size_t>(ds.labels[i])]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

namespace {

constexpr char kLdaMagic[8] = {'H', 'S', 'L', 'D', 'A', 'v', '1', '\n'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
    put_u64(out, std::bit_cast<std::uint64_t>(d));
}

std::uint64_t get_u64(const std::string& b, std::size_t& pos, const std::string& path) {
    if (pos + 8 > b.size()) throw Error(path + ": truncated LDA model file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(
                 static_cast<unsigned char>(b[pos + static_cast<std::size_t>(i)]))
             << (8 * i);
    pos += 8;
    return v;
}

double get_f64(const std::string& b, std::size_t& pos, const std::string& path) {
    return std::bit_cast<double>(get_u64(b, pos, path));
}

} // namespace

void save_lda(const LdaModel& m, const std::string& path) {
    std::string out;
    out.append(kLdaMagic, sizeof(kLdaMagic));
    put_u64(out, m.bands());
    put_u64(out, m.class_count());
    for (std::size_t b = 0; b < m.bands(); ++b) put_f64(out, m.grid[b]);
    for (const auto& name : m.class_names) {
        put_u64(out, name.size());
        out.append(name);
    }
    for (std::size_t i = 0; i < m.class_means.size(); ++i)
        put_f64(out, m.class_means.data()[i]);
    for (std::size_t i = 0; i < m.chol_lower.size(); ++i)
        put_f64(out, m.chol_lower.data()[i]);
    for (double v : m.log_priors) put_f64(out, v);
    put_f64(out, m.shrinkage);

    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write LDA model file '" + path + "'");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("write failed for '" + path + "'");
}

LdaModel load_lda(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open LDA model file '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    if (bytes.size() < sizeof(kLdaMagic) ||
        bytes.compare(0, sizeof(kLdaMagic), kLdaMagic, sizeof(kLdaMagic)) != 0)
        throw Error(path + ": not an LDA model file (bad magic/version)");
    pos = sizeof(kLdaMagic);

    const std::uint64_t nb = get_u64(bytes, pos, path);
    const std::uint64_t nc = get_u64(bytes, pos, path);
    if (nb == 0 || nc == 0) throw Error(path + ": LDA model declares a zero dimension");

    std::vector<double> wl(nb);
    for (auto& w : wl) w = get_f64(bytes, pos, path);

    LdaModel m;
    m.grid = WavelengthGrid(std::move(wl));
    for (std::uint64_t c = 0; c < nc; ++c) {
        const std::uint64_t len = get_u64(bytes, pos, path);
        if (len > 4096 || pos + len > bytes.size())
            throw Error(path + ": truncated LDA model file");
        m.class_names.push_back(bytes.substr(pos, len));
        pos += len;
    }
    m.class_means = Matrix(nc, nb);
    for (std::size_t i = 0; i < m.class_means.size(); ++i)
        m.class_means.data()[i] = get_f64(bytes, pos, path);
    m.chol_lower = Matrix(nb, nb);
    for (std::size_t i = 0; i < m.chol_lower.size(); ++i)
        m.chol_lower.data()[i] = get_f64(bytes, pos, path);
    m.log_priors.resize(nc);
    for (double& v : m.log_priors) v = get_f64(bytes, pos, path);
    m.shrinkage = get_f64(bytes, pos, path);
    if (pos != bytes.size())
        throw Error(path + ": trailing bytes after LDA model payload");
    compute_discriminants(m);
    return m;
}

} // namespace hsi
