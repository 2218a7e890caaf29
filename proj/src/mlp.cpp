#include "hsi/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsi/rng.hpp"

namespace hsi {

namespace {

struct Gradients {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;
    double loss = 0.0;
};

// z -> softmax rows in place, with per-row max subtraction.
void softmax_rows(Matrix& z) {
    for (std::size_t i = 0; i < z.rows(); ++i) {
        auto row = z.row(i);
        const double zmax = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - zmax);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
}

// Hidden pre-activations for a batch: x*w1 + b1.
Matrix hidden_preact(const MlpModel& m, const Matrix& x) {
    Matrix z1 = matmul(x, m.w1);
    for (std::size_t i = 0; i < z1.rows(); ++i) {
        auto row = z1.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += m.b1[j];
    }
    return z1;
}

Matrix output_logits(const MlpModel& m, const Matrix& h) {
    Matrix z2 = matmul(h, m.w2);
    for (std::size_t i = 0; i < z2.rows(); ++i) {
        auto row = z2.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += m.b2[j];
    }
    return z2;
}

double logsumexp(std::span<const double> v) {
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Mean cross-entropy of the batch, dropout mask optional (inverted scaling
// already baked into the mask values: 0 or 1/keep).
double batch_loss(const MlpModel& m, const Matrix& x, const std::vector<int>& y,
                  const std::vector<double>* mask) {
    Matrix z1 = hidden_preact(m, x);
    for (std::size_t i = 0; i < z1.rows(); ++i) {
        auto row = z1.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = row[j] > 0.0 ? row[j] : 0.0;
            if (mask) row[j] *= (*mask)[j];
        }
    }
    Matrix z2 = output_logits(m, z1);
    double loss = 0.0;
    for (std::size_t i = 0; i < z2.rows(); ++i) {
        const auto row = z2.row(i);
        loss += logsumexp(row) - row[static_cast<std::size_t>(y[i])];
    }
    return loss / static_cast<double>(x.rows());
}

// Backprop of mean cross-entropy for one batch. ReLU subgradient at 0 is 0
// (strict z > 0 test).
Gradients backprop(const MlpModel& m, const Matrix& x, const std::vector<int>& y,
                   const std::vector<double>* mask) {
    const auto n = static_cast<double>(x.rows());
    Matrix z1 = hidden_preact(m, x);
    Matrix h = z1;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        auto row = h.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = row[j] > 0.0 ? row[j] : 0.0;
            if (mask) row[j] *= (*mask)[j];
        }
    }
    Matrix z2 = output_logits(m, h);

    Gradients g;
    g.loss = 0.0;
    for (std::size_t i = 0; i < z2.rows(); ++i) {
        const auto row = z2.row(i);
        g.loss += logsumexp(row) - row[static_cast<std::size_t>(y[i])];
    }
    g.loss /= n;

    // dL/dz2 = (softmax - onehot) / n
    Matrix g2 = z2;
    softmax_rows(g2);
    for (std::size_t i = 0; i < g2.rows(); ++i) {
        g2(i, static_cast<std::size_t>(y[i])) -= 1.0;
        auto row = g2.row(i);
        for (double& v : row) v /= n;
    }

    g.w2 = matmul_ta(h, g2);
    g.b2.assign(m.class_count(), 0.0);
    for (std::size_t i = 0; i < g2.rows(); ++i) {
        const auto row = g2.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) g.b2[j] += row[j];
    }

    // back through dropout scaling and ReLU
    Matrix gh = matmul_tb(g2, m.w2);
    for (std::size_t i = 0; i < gh.rows(); ++i) {
        auto row = gh.row(i);
        const auto zrow = z1.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (mask) row[j] *= (*mask)[j];
            if (!(zrow[j] > 0.0)) row[j] = 0.0;
        }
    }

    g.w1 = matmul_ta(x, gh);
    g.b1.assign(m.hidden_units(), 0.0);
    for (std::size_t i = 0; i < gh.rows(); ++i) {
        const auto row = gh.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) g.b1[j] += row[j];
    }
    return g;
}

// Glorot-uniform init, row-major draw order: w1 first, then w2, biases zero.
MlpModel init_model(const LabeledDataset& ds, const MlpConfig& cfg, Rng& rng) {
    MlpModel m;
    m.grid = ds.grid;
    m.class_names = ds.class_names;
    const std::size_t bands = ds.bands(), hidden = cfg.hidden_units,
                      classes = ds.class_count();
    m.w1 = Matrix(bands, hidden);
    m.w2 = Matrix(hidden, classes);
    m.b1.assign(hidden, 0.0);
    m.b2.assign(classes, 0.0);
    const double a1 = std::sqrt(6.0 / static_cast<double>(bands + hidden));
    for (std::size_t i = 0; i < m.w1.size(); ++i)
        m.w1.data()[i] = rng.uniform(-a1, a1);
    const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + classes));
    for (std::size_t i = 0; i < m.w2.size(); ++i)
        m.w2.data()[i] = rng.uniform(-a2, a2);
    return m;
}

// Adaptive-moment state for one parameter tensor.
struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(double* param, const double* grad, AdamState& st, std::size_t n,
               const MlpConfig& cfg, std::size_t t) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < n; ++i) {
        st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * grad[i];
        st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mhat = st.m[i] / bc1;
        const double vhat = st.v[i] / bc2;
        param[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
}

void check_input_shape(const MlpModel& m, const Matrix& x) {
    if (x.cols() != m.bands())
        throw Error("mlp: input has " + std::to_string(x.cols()) +
                    " bands, model expects " + std::to_string(m.bands()));
}

} // namespace

void MlpConfig::validate() const {
    if (hidden_units < 1) throw Error("mlp config: hidden_units must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw Error("mlp config: dropout_rate must be in [0, 1)");
    if (epochs < 1) throw Error("mlp config: epochs must be >= 1");
    if (batch_size < 1) throw Error("mlp config: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw Error("mlp config: learning_rate must be > 0");
}

void MlpModel::validate() const {
    if (w1.rows() != bands() || w1.cols() != hidden_units() ||
        w2.rows() != hidden_units() || w2.cols() != class_count() ||
        b2.size() != class_count())
        throw Error("mlp model: inconsistent shapes");
    if (!all_finite(w1) || !all_finite(w2) || !all_finite(b1) || !all_finite(b2))
        throw Error("mlp model: non-finite weights");
}

Matrix forward(const MlpModel& m, const Matrix& x) {
    check_input_shape(m, x);
    Matrix h = hidden_preact(m, x);
    for (std::size_t i = 0; i < h.size(); ++i)
        h.data()[i] = h.data()[i] > 0.0 ? h.data()[i] : 0.0;
    Matrix z2 = output_logits(m, h);
    softmax_rows(z2);
    return z2;
}

std::pair<MlpModel, TrainReport> train(const LabeledDataset& ds, const MlpConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    ds.validate();
    if (ds.class_count() < 2)
        throw Error("train: need at least 2 classes, got " +
                    std::to_string(ds.class_count()));

    Rng rng(cfg.seed);
    MlpModel model = init_model(ds, cfg, rng);

    AdamState sw1(model.w1.size()), sb1(model.b1.size());
    AdamState sw2(model.w2.size()), sb2(model.b2.size());
    std::size_t step = 0;

    const std::size_t n = ds.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const double keep = 1.0 - cfg.dropout_rate;
    std::vector<double> mask(cfg.hidden_units);

    TrainReport report;
    report.epoch_loss.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t m = std::min(cfg.batch_size, n - start);
            Matrix xb(m, ds.bands());
            std::vector<int> yb(m);
            for (std::size_t i = 0; i < m; ++i) {
                const auto src = ds.spectra.row(order[start + i]);
                std::copy(src.begin(), src.end(), xb.row(i).begin());
                yb[i] = ds.labels[order[start + i]];
            }
            const std::vector<double>* mask_ptr = nullptr;
            if (cfg.dropout_rate > 0.0) {
                for (double& v : mask)
                    v = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
                mask_ptr = &mask;
            }
            Gradients g = backprop(model, xb, yb, mask_ptr);
            loss_sum += g.loss;
            ++batches;
            ++step;
            adam_step(model.w1.data(), g.w1.data(), sw1, model.w1.size(), cfg, step);
            adam_step(model.b1.data(), g.b1.data(), sb1, model.b1.size(), cfg, step);
            adam_step(model.w2.data(), g.w2.data(), sw2, model.w2.size(), cfg, step);
            adam_step(model.b2.data(), g.b2.data(), sb2, model.b2.size(), cfg, step);
        }
        const double epoch_loss = loss_sum / static_cast<double>(batches);
        if (!std::isfinite(epoch_loss))
            throw TrainDivergence(epoch, "train: loss diverged at epoch " +
                                             std::to_string(epoch));
        report.epoch_loss.push_back(epoch_loss);
    }

    report.train_accuracy = accuracy(model, ds);
    report.elapsed = std::chrono::steady_clock::now() - t0;
    return {std::move(model), std::move(report)};
}

std::vector<int> predict(const MlpModel& m, const Matrix& x) {
    const Matrix p = forward(m, x);
    std::vector<int> out(p.rows());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        const auto row = p.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c)
            if (row[c] > row[best]) best = c;
        out[i] = static_cast<int>(best);
    }
    return out;
}

double accuracy(const MlpModel& m, const LabeledDataset& ds) {
    ds.validate(false);
    if (ds.size() == 0) throw Error("accuracy: empty dataset");
    check_input_shape(m, ds.spectra);
    // Map dataset labels onto model class indices by name.
    std::vector<int> remap(ds.class_count());
    for (std::size_t c = 0; c < ds.class_count(); ++c) {
        auto it = std::find(m.class_names.begin(), m.class_names.end(),
                            ds.class_names[c]);
        if (it == m.class_names.end())
            throw Error("accuracy: dataset class '" + ds.class_names[c] +
                        "' unknown to the model");
        remap[c] = static_cast<int>(it - m.class_names.begin());
    }
    const auto pred = predict(m, ds.spectra);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == remap[static_cast<std::size_t>(ds.labels[i])]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double gradient_check(const MlpConfig& cfg, const LabeledDataset& ds) {
    ds.validate();
    Rng rng(cfg.seed);
    MlpModel model = init_model(ds, cfg, rng);

    Matrix x = ds.spectra;
    std::vector<int> y = ds.labels;
    const Gradients analytic = backprop(model, x, y, nullptr);

    const double h = 1e-5;
    double max_rel = 0.0;
    auto probe = [&](double* param, const double* grad, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            const double saved = param[i];
            param[i] = saved + h;
            const double lp = batch_loss(model, x, y, nullptr);
            param[i] = saved - h;
            const double lm = batch_loss(model, x, y, nullptr);
            param[i] = saved;
            const double numeric = (lp - lm) / (2.0 * h);
            const double denom =
                std::max({std::abs(grad[i]), std::abs(numeric), 1e-3});
            max_rel = std::max(max_rel, std::abs(grad[i] - numeric) / denom);
        }
    };
    probe(model.w1.data(), analytic.w1.data(), model.w1.size());
    probe(model.b1.data(), analytic.b1.data(), model.b1.size());
    probe(model.w2.data(), analytic.w2.data(), model.w2.size());
    probe(model.b2.data(), analytic.b2.data(), model.b2.size());
    return max_rel;
}

} // namespace hsi
