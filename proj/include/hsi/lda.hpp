#pragma once

#include <string>
#include <vector>

#include "hsi/matrix.hpp"
#include "hsi/spectra_io.hpp"

namespace hsi {

/// Linear discriminant classifier over pooled within-class covariance.
/// The covariance is kept as its Cholesky factor; discriminant
/// coefficients are solved once at fit time, no explicit inverse.
struct LdaModel {
    Matrix class_means;              // classes x bands
    Matrix chol_lower;               // bands x bands, L with L*L^T = regularized covariance
    Matrix discriminant_coef;        // classes x bands, rows are sigma^-1 * mu_c
    std::vector<double> discriminant_const; // -mu_c^T sigma^-1 mu_c / 2 + log prior_c
    std::vector<double> log_priors;
    double shrinkage = 0.1;
    std::vector<std::string> class_names;
    WavelengthGrid grid;

    std::size_t bands() const { return grid.size(); }
    std::size_t class_count() const { return class_names.size(); }
};

/// Fits on pooled covariance sum_c sum_i (x - mu_c)(x - mu_c)^T / (n - C),
/// regularized to (1 - shrinkage) * sigma + shrinkage * avg_var * I.
/// Throws (advising a larger shrinkage) when the regularized covariance is
/// not positive definite.
LdaModel fit_lda(const LabeledDataset& ds, double shrinkage = 0.1);

/// argmax_c of x^T coef_c + const_c per row; ties to the lower class index.
std::vector<int> predict_lda(const LdaModel& model, const Matrix& x);

double lda_accuracy(const LdaModel& model, const LabeledDataset& ds);

void save_lda(const LdaModel& model, const std::string& path);
LdaModel load_lda(const std::string& path);

} // namespace hsi
