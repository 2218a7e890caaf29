#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "hsi/lda.hpp"
#include "hsi/mlp.hpp"
#include "hsi/rng.hpp"
#include "test_util.hpp"

using namespace hsi;
using hsitest::TempDir;

namespace {

MlpModel random_model(std::size_t bands, std::size_t hidden, std::size_t classes,
                      Rng& rng) {
    MlpModel m;
    std::vector<double> wl(bands);
    for (std::size_t b = 0; b < bands; ++b) wl[b] = 400.0 + 10.0 * static_cast<double>(b);
    m.grid = WavelengthGrid(wl);
    for (std::size_t c = 0; c < classes; ++c)
        m.class_names.push_back("c" + std::to_string(c));
    m.w1 = Matrix(bands, hidden);
    m.w2 = Matrix(hidden, classes);
    for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = rng.uniform(-1, 1);
    m.b1.resize(hidden);
    m.b2.resize(classes);
    for (auto& v : m.b1) v = rng.uniform(-0.5, 0.5);
    for (auto& v : m.b2) v = rng.uniform(-0.5, 0.5);
    return m;
}

// Straight-line reference path: independent dense/ReLU/softmax with scalar
// loops, no shared code with the library implementation.
std::vector<double> oracle_forward_row(const MlpModel& m, std::span<const double> x) {
    std::vector<double> h(m.hidden_units(), 0.0);
    for (std::size_t j = 0; j < m.hidden_units(); ++j) {
        double z = m.b1[j];
        for (std::size_t b = 0; b < m.bands(); ++b) z += x[b] * m.w1(b, j);
        h[j] = z > 0.0 ? z : 0.0;
    }
    std::vector<double> logits(m.class_count(), 0.0);
    for (std::size_t c = 0; c < m.class_count(); ++c) {
        double z = m.b2[c];
        for (std::size_t j = 0; j < m.hidden_units(); ++j) z += h[j] * m.w2(j, c);
        logits[c] = z;
    }
    double zmax = logits[0];
    for (double z : logits) zmax = std::max(zmax, z);
    double sum = 0.0;
    for (double& z : logits) {
        z = std::exp(z - zmax);
        sum += z;
    }
    for (double& z : logits) z /= sum;
    return logits;
}

// Two well-separated Gaussian blobs in band space.
LabeledDataset blob_dataset(std::size_t per_class, std::size_t bands, Rng& rng) {
    LabeledDataset ds;
    std::vector<double> wl(bands);
    for (std::size_t b = 0; b < bands; ++b) wl[b] = 500.0 + 20.0 * static_cast<double>(b);
    ds.grid = WavelengthGrid(wl);
    ds.class_names = {"low", "high"};
    ds.spectra = Matrix(2 * per_class, bands);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int label = i < per_class ? 0 : 1;
        const double center = label == 0 ? 0.2 : 0.7;
        for (std::size_t b = 0; b < bands; ++b)
            ds.spectra(i, b) = center + rng.normal(0.0, 0.03);
        ds.labels.push_back(label);
    }
    return ds;
}

bool models_equal(const MlpModel& a, const MlpModel& b) {
    return a.grid == b.grid && a.class_names == b.class_names &&
           std::memcmp(a.w1.data(), b.w1.data(), a.w1.size() * 8) == 0 &&
           std::memcmp(a.w2.data(), b.w2.data(), a.w2.size() * 8) == 0 &&
           std::memcmp(a.b1.data(), b.b1.data(), a.b1.size() * 8) == 0 &&
           std::memcmp(a.b2.data(), b.b2.data(), a.b2.size() * 8) == 0;
}

} // namespace

TEST_CASE("forward on a zero model is uniform") {
    Rng rng(1);
    auto m = random_model(4, 6, 3, rng);
    for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = 0.0;
    for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = 0.0;
    m.b1.assign(m.b1.size(), 0.0);
    m.b2.assign(m.b2.size(), 0.0);

    Matrix x(2, 4);
    x(0, 0) = 0.9;
    x(1, 3) = -0.4;
    const auto p = forward(m, x);
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(p(i, c) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("forward matches an independent reference implementation") {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t bands = 1 + rng.below(6), hidden = 1 + rng.below(8),
                          classes = 2 + rng.below(4);
        const auto m = random_model(bands, hidden, classes, rng);
        Matrix x(3, bands);
        for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 2);

        const auto p = forward(m, x);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto expect = oracle_forward_row(m, x.row(i));
            double sum = 0.0;
            for (std::size_t c = 0; c < classes; ++c) {
                CHECK(p(i, c) == doctest::Approx(expect[c]).epsilon(1e-12));
                CHECK(p(i, c) > 0.0);
                CHECK(p(i, c) < 1.0);
                sum += p(i, c);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    Rng rng2(22);
    const auto m = random_model(3, 4, 2, rng2);
    Matrix bad(1, 5);
    CHECK_THROWS_AS(forward(m, bad), Error);
}

TEST_CASE("predict ties break to the lower class index") {
    Rng rng(2);
    auto m = random_model(2, 3, 4, rng);
    for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = 0.0;
    for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = 0.0;
    m.b1.assign(m.b1.size(), 0.0);
    m.b2.assign(m.b2.size(), 0.0);
    Matrix x(1, 2);
    CHECK(predict(m, x) == std::vector<int>{0});

    m.b2 = {0.1, 0.7, 0.2, 0.7}; // joint max at 1 and 3
    CHECK(predict(m, x) == std::vector<int>{1});

    // argmax agreement with the reference path
    Rng rng3(33);
    const auto rm = random_model(4, 5, 3, rng3);
    Matrix xs(100, 4);
    for (std::size_t i = 0; i < xs.size(); ++i) xs.data()[i] = rng3.uniform(-1, 2);
    const auto pred = predict(rm, xs);
    for (std::size_t i = 0; i < xs.rows(); ++i) {
        const auto probs = oracle_forward_row(rm, xs.row(i));
        int best = 0;
        for (int c = 1; c < 3; ++c)
            if (probs[static_cast<std::size_t>(c)] > probs[static_cast<std::size_t>(best)])
                best = c;
        CHECK(pred[i] == best);
    }
}

TEST_CASE("accuracy") {
    Rng rng(3);
    // constant-prediction model on balanced two-class data scores 0.5
    auto m = random_model(2, 3, 2, rng);
    for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = 0.0;
    for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = 0.0;
    m.b1.assign(m.b1.size(), 0.0);
    m.b2.assign(m.b2.size(), 0.0);
    m.class_names = {"a", "b"};
    const auto ds = hsitest::make_dataset(
        {410, 420}, {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}, {0.7, 0.8}}, {0, 0, 1, 1},
        {"a", "b"});
    CHECK(accuracy(m, ds) == 0.5);

    // manual tally oracle on a 10-sample set with a random model
    Rng rng2(4);
    const auto rm = random_model(2, 4, 2, rng2);
    Matrix x(10, 2);
    std::vector<int> labels(10);
    std::vector<std::vector<double>> rows(10, std::vector<double>(2));
    for (std::size_t i = 0; i < 10; ++i) {
        rows[i][0] = rng2.uniform01();
        rows[i][1] = rng2.uniform01();
        labels[i] = static_cast<int>(rng2.below(2));
        x(i, 0) = rows[i][0];
        x(i, 1) = rows[i][1];
    }
    labels[0] = 0;
    labels[1] = 1;
    auto ds2 = hsitest::make_dataset({410, 420}, rows, labels, {"c0", "c1"});
    const auto pred = predict(rm, x);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < 10; ++i)
        if (pred[i] == labels[i]) ++hits;
    CHECK(accuracy(rm, ds2) == doctest::Approx(static_cast<double>(hits) / 10.0));

    // class-name remapping: same data, class names listed in swapped order
    auto ds3 = ds2;
    ds3.class_names = {"c1", "c0"};
    for (auto& l : ds3.labels) l = 1 - l;
    CHECK(accuracy(rm, ds3) == accuracy(rm, ds2));

    // unknown class name
    auto ds4 = ds2;
    ds4.class_names = {"c0", "mystery"};
    CHECK_THROWS_AS(accuracy(rm, ds4), Error);
}

TEST_CASE("gradient check stays under 1e-5 on random small instances") {
    Rng rng(50);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + rng.below(18), bands = 1 + rng.below(10),
                          classes = 2 + rng.below(3);
        std::vector<std::vector<double>> rows(n, std::vector<double>(bands));
        std::vector<int> labels(n);
        std::vector<std::string> names;
        for (std::size_t c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = i < classes ? static_cast<int>(i)
                                    : static_cast<int>(rng.below(classes));
            for (auto& v : rows[i]) v = rng.uniform(-0.5, 1.5);
        }
        std::vector<double> wl(bands);
        for (std::size_t b = 0; b < bands; ++b)
            wl[b] = 400.0 + 11.0 * static_cast<double>(b);
        const auto ds = hsitest::make_dataset(wl, rows, labels, names);

        MlpConfig cfg;
        cfg.hidden_units = 1 + rng.below(8);
        cfg.seed = rng.next_u64();
        CHECK(gradient_check(cfg, ds) < 1e-5);
    }
}

TEST_CASE("gradient check degenerate cases") {
    MlpConfig cfg;
    cfg.hidden_units = 5;
    cfg.seed = 7;

    // zero input: loss does not depend on w1 at all, so both gradient routes
    // must agree at exactly zero there and the max error stays tiny
    const auto zero_ds = hsitest::make_dataset(
        {400, 500}, {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}, {0, 1, 0, 1},
        {"a", "b"});
    CHECK(gradient_check(cfg, zero_ds) < 1e-6);

    // duplicating the dataset leaves the mean-loss gradient unchanged:
    // training one full-batch epoch gives near-identical updates
    Rng rng(8);
    auto ds = blob_dataset(6, 3, rng);
    auto dup = ds;
    dup.spectra = Matrix(2 * ds.size(), ds.bands());
    dup.labels.clear();
    for (std::size_t copy = 0; copy < 2; ++copy)
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto src = ds.spectra.row(i);
            std::copy(src.begin(), src.end(),
                      dup.spectra.row(copy * ds.size() + i).begin());
            dup.labels.push_back(ds.labels[i]);
        }

    MlpConfig fb;
    fb.hidden_units = 4;
    fb.epochs = 1;
    fb.batch_size = 2 * ds.size();
    fb.dropout_rate = 0.0;
    fb.seed = 99;
    const auto [m1, r1] = train(ds, fb);
    const auto [m2, r2] = train(dup, fb);
    CHECK(r1.epoch_loss[0] == doctest::Approx(r2.epoch_loss[0]).epsilon(1e-12));
    for (std::size_t i = 0; i < m1.w1.size(); ++i)
        CHECK(m1.w1.data()[i] == doctest::Approx(m2.w1.data()[i]).epsilon(1e-12));
}

TEST_CASE("training separates Gaussian blobs") {
    Rng rng(60);
    const auto ds = blob_dataset(60, 5, rng);

    // independent separability oracle first: LDA must nail this set
    const auto lda = fit_lda(ds, 0.1);
    CHECK(lda_accuracy(lda, ds) == 1.0);

    MlpConfig cfg;
    cfg.hidden_units = 16;
    cfg.epochs = 50;
    cfg.seed = 5;
    const auto [model, report] = train(ds, cfg);
    CHECK(report.train_accuracy == 1.0);
    CHECK(report.epoch_loss.size() == 50);
    for (double l : report.epoch_loss) CHECK(l >= 0.0);
    CHECK(report.epoch_loss[9] < report.epoch_loss[0]);
}

TEST_CASE("training is deterministic") {
    Rng rng(61);
    const auto ds = blob_dataset(20, 4, rng);
    MlpConfig cfg;
    cfg.hidden_units = 8;
    cfg.epochs = 5;
    cfg.seed = 17;

    SUBCASE("with dropout disabled") {
        cfg.dropout_rate = 0.0;
        const auto [m1, r1] = train(ds, cfg);
        const auto [m2, r2] = train(ds, cfg);
        CHECK(models_equal(m1, m2));
        CHECK(r1.epoch_loss == r2.epoch_loss);
    }
    SUBCASE("with dropout enabled") {
        cfg.dropout_rate = 0.2;
        const auto [m1, r1] = train(ds, cfg);
        const auto [m2, r2] = train(ds, cfg);
        CHECK(models_equal(m1, m2));
        CHECK(r1.epoch_loss == r2.epoch_loss);
    }
    SUBCASE("different seeds differ") {
        const auto [m1, r1] = train(ds, cfg);
        cfg.seed = 18;
        const auto [m2, r2] = train(ds, cfg);
        CHECK_FALSE(models_equal(m1, m2));
    }
}

TEST_CASE("training rejects bad inputs and reports divergence") {
    Rng rng(62);
    auto ds = blob_dataset(10, 3, rng);

    SUBCASE("single-class dataset") {
        LabeledDataset one = ds;
        one.class_names = {"only"};
        one.labels.assign(one.labels.size(), 0);
        MlpConfig cfg;
        CHECK_THROWS_WITH_AS(train(one, cfg), doctest::Contains("2 classes"), Error);
    }
    SUBCASE("divergence carries the epoch index") {
        MlpConfig cfg;
        cfg.hidden_units = 8;
        cfg.epochs = 30;
        cfg.learning_rate = 1e18; // blows up immediately
        cfg.seed = 3;
        try {
            train(ds, cfg);
            FAIL("expected divergence");
        } catch (const TrainDivergence& e) {
            CHECK(e.epoch() < 30);
            CHECK(std::string(e.what()).find("epoch") != std::string::npos);
        }
    }
    SUBCASE("config validation") {
        MlpConfig cfg;
        cfg.dropout_rate = 1.0;
        CHECK_THROWS_AS(train(ds, cfg), Error);
        cfg.dropout_rate = 0.2;
        cfg.hidden_units = 0;
        CHECK_THROWS_AS(train(ds, cfg), Error);
        cfg.hidden_units = 4;
        cfg.epochs = 0;
        CHECK_THROWS_AS(train(ds, cfg), Error);
    }
}

TEST_CASE("inverted dropout preserves activation expectation") {
    // masks drawn exactly as training draws them: Bernoulli(keep), scaled by
    // 1/keep
    const double keep = 0.8;
    const std::size_t hidden = 128, draws = 20000;
    std::vector<double> h(hidden);
    Rng hr(9);
    for (auto& v : h) v = 0.1 + hr.uniform01();

    Rng rng(10);
    std::vector<double> mean(hidden, 0.0);
    for (std::size_t d = 0; d < draws; ++d)
        for (std::size_t j = 0; j < hidden; ++j) {
            const double mask = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
            mean[j] += mask * h[j];
        }
    for (std::size_t j = 0; j < hidden; ++j) {
        mean[j] /= static_cast<double>(draws);
        CHECK(mean[j] == doctest::Approx(h[j]).epsilon(0.02));
    }
}

TEST_CASE("model save/load round trip is bitwise exact") {
    TempDir td("mlp");
    Rng rng(70);
    const auto ds = blob_dataset(15, 4, rng);
    MlpConfig cfg;
    cfg.hidden_units = 6;
    cfg.epochs = 3;
    cfg.seed = 2;
    const auto [model, report] = train(ds, cfg);

    const auto path = td.file("m.bin");
    save_model(model, path);
    const auto back = load_model(path);
    CHECK(models_equal(model, back));

    SUBCASE("truncated file is rejected") {
        auto bytes = hsitest::slurp(path);
        hsitest::spit(td.file("trunc.bin"), bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_WITH_AS(load_model(td.file("trunc.bin")),
                             doctest::Contains("truncated"), Error);
    }
    SUBCASE("garbage is rejected") {
        hsitest::spit(td.file("junk.bin"), "definitely not a model");
        CHECK_THROWS_AS(load_model(td.file("junk.bin")), Error);
    }
    SUBCASE("grid-length mismatch is a shape error") {
        const auto other = hsitest::make_dataset(
            {400, 500, 600, 700, 800},
            {{0.1, 0.2, 0.3, 0.4, 0.5}, {0.2, 0.3, 0.4, 0.5, 0.6}}, {0, 1},
            {"low", "high"});
        CHECK_THROWS_AS(accuracy(back, other), Error);
    }
}
