#pragma once

#include <string>
#include <vector>

#include "fp/matrix.hpp"

namespace fp {

// Binary logistic regression fitted by iteratively reweighted least squares.
struct LogitModel {
    std::vector<std::string> coefficient_names;  // "(Intercept)" first
    std::vector<double> coefficients;            // aligned with names
    std::vector<double> covariance;              // row-major, inverse observed information
    double log_likelihood = 0.0;
    double null_log_likelihood = 0.0;
    std::size_t n = 0;
    bool converged = false;
    bool separation = false;  // some |beta| ran past the e^30 odds guard
    int iterations = 0;

    double covariance_at(std::size_t i, std::size_t j) const {
        return covariance[i * coefficients.size() + j];
    }
};

// Fits on the raw (unscaled) design; an intercept column is added internally.
// feature_names must match x's columns. Throws on single-class labels and on
// rank-deficient designs (naming the collinear columns).
LogitModel fit_logit(const Matrix& x, const std::vector<char>& y,
                     const std::vector<std::string>& feature_names, int max_iter = 100,
                     double tol = 1e-8);

struct WaldRow {
    std::string variable;
    double beta = 0.0;
    double standard_error = 0.0;
    double wald_statistic = 0.0;  // (beta/SE)^2 against chi-squared(1)
    double p_value = 0.0;
    double odds_ratio = 0.0;  // exp(beta)
};

// One row per coefficient; requires a converged model.
std::vector<WaldRow> wald_table(const LogitModel& model, bool include_intercept = false);

// "***" p<0.001, "**" p<0.01, "*" p<0.05, "" otherwise.
const char* significance_stars(double p);

double nagelkerke_r2(const LogitModel& model);

// sigmoid(beta0 + beta . x); x must match the model's feature count.
double predict_logit(const LogitModel& model, const std::vector<double>& x);

}  // namespace fp
