#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hsi/matrix.hpp"
#include "hsi/spectra_io.hpp"

namespace hsi {

/// Architecture and training knobs for the shallow classifier:
/// dense(hidden_units, ReLU) -> dropout(dropout_rate) -> dense(softmax).
/// Optimizer defaults are the common adaptive-moment settings.
struct MlpConfig {
    std::size_t hidden_units = 128;
    double dropout_rate = 0.2;
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Trained network plus the metadata needed to interpret it: the wavelength
/// each input weight belongs to and the class each output weight scores.
struct MlpModel {
    Matrix w1;              // bands x hidden
    std::vector<double> b1; // hidden
    Matrix w2;              // hidden x classes
    std::vector<double> b2; // classes
    WavelengthGrid grid;
    std::vector<std::string> class_names;

    std::size_t bands() const { return grid.size(); }
    std::size_t hidden_units() const { return b1.size(); }
    std::size_t class_count() const { return class_names.size(); }
    void validate() const;
};

struct TrainReport {
    std::vector<double> epoch_loss; // mean over batches, one entry per epoch
    double train_accuracy = 0.0;
    std::chrono::duration<double> elapsed{};
};

/// Inference-mode forward pass; rows of the result are class probabilities.
Matrix forward(const MlpModel& model, const Matrix& x);

/// Mini-batch adaptive-moment training on mean cross-entropy with inverted
/// dropout. Deterministic given (dataset, config): one seeded generator
/// drives weight init, the per-epoch shuffle and the dropout masks, in that
/// order. Throws TrainDivergence if an epoch loss is not finite.
std::pair<MlpModel, TrainReport> train(const LabeledDataset& ds, const MlpConfig& cfg);

/// Row-wise argmax of forward(); ties go to the lower class index.
std::vector<int> predict(const MlpModel& model, const Matrix& x);

/// Fraction of samples whose prediction matches the label. Dataset class
/// names are matched to model class names by name.
double accuracy(const MlpModel& model, const LabeledDataset& ds);

/// Compares analytic gradients of the mean cross-entropy against central
/// finite differences (step 1e-5) for every parameter of a freshly
/// initialized model, dropout off. Returns the max relative error.
double gradient_check(const MlpConfig& cfg, const LabeledDataset& ds);

/// Binary model file with version tag, shapes, wavelengths, class names and
/// row-major weight payloads. Round trip is bitwise exact.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

} // namespace hsi
