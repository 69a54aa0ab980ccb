#include "fp/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "fp/special_functions.hpp"

namespace fp {
namespace {

constexpr double kSeparationBound = 30.0;  // odds beyond e^30 are numeric noise
constexpr double kWeightFloor = 1e-10;

double log1p_exp(double v) {  // log(1 + e^v), overflow-safe
    return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
}

double log_likelihood_of(const Eigen::VectorXd& eta, const std::vector<char>& y) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        ll += (y[std::size_t(i)] ? eta[i] : 0.0) - log1p_exp(eta[i]);
    return ll;
}

}  // namespace

LogitModel fit_logit(const Matrix& x, const std::vector<char>& y,
                     const std::vector<std::string>& feature_names, int max_iter, double tol) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols() + 1;  // with intercept
    if (y.size() != n) throw ValidationError("label vector length does not match the matrix");
    if (feature_names.size() != x.cols())
        throw ValidationError("feature name count does not match the matrix");
    if (n < p + 1) throw ValidationError("need more observations than coefficients");
    const std::size_t n_pos = std::size_t(std::count(y.begin(), y.end(), char(1)));
    if (n_pos == 0 || n_pos == n)
        throw ValidationError("labels contain a single class; logit is undefined");

    Eigen::MatrixXd design(n, p);
    for (std::size_t r = 0; r < n; ++r) {
        design(Eigen::Index(r), 0) = 1.0;
        for (std::size_t c = 0; c < x.cols(); ++c)
            design(Eigen::Index(r), Eigen::Index(c + 1)) = x.at(r, c);
    }

    {  // refuse rank-deficient designs, naming the dependent columns
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        qr.setThreshold(1e-10);
        const auto rank = qr.rank();
        if (rank < Eigen::Index(p)) {
            const auto perm = qr.colsPermutation().indices();
            std::ostringstream msg;
            msg << "design matrix is rank deficient; dependent column(s):";
            for (Eigen::Index i = rank; i < Eigen::Index(p); ++i) {
                const Eigen::Index col = perm[i];
                msg << ' ' << (col == 0 ? "(Intercept)" : feature_names[std::size_t(col - 1)]);
            }
            throw ValidationError(msg.str());
        }
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(Eigen::Index(p));
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(Eigen::Index(n));
    double ll = log_likelihood_of(eta, y);

    LogitModel model;
    model.n = n;
    model.coefficient_names.reserve(p);
    model.coefficient_names.emplace_back("(Intercept)");
    model.coefficient_names.insert(model.coefficient_names.end(), feature_names.begin(),
                                   feature_names.end());
    const double prevalence = double(n_pos) / double(n);
    model.null_log_likelihood =
        double(n_pos) * std::log(prevalence) + double(n - n_pos) * std::log(1.0 - prevalence);

    Eigen::VectorXd prob(n), w(n), residual(n);
    for (int iter = 1; iter <= max_iter; ++iter) {
        model.iterations = iter;
        for (Eigen::Index i = 0; i < Eigen::Index(n); ++i) {
            prob[i] = 1.0 / (1.0 + std::exp(-eta[i]));
            w[i] = std::max(prob[i] * (1.0 - prob[i]), kWeightFloor);
            residual[i] = (y[std::size_t(i)] ? 1.0 : 0.0) - prob[i];
        }
        const Eigen::VectorXd gradient = design.transpose() * residual;
        const Eigen::MatrixXd information =
            design.transpose() * w.asDiagonal() * design;
        Eigen::VectorXd delta = information.ldlt().solve(gradient);

        // step-halving keeps the likelihood non-decreasing
        double step = 1.0;
        Eigen::VectorXd candidate;
        double new_ll = -std::numeric_limits<double>::infinity();
        for (int h = 0; h < 30; ++h) {
            candidate = beta + step * delta;
            new_ll = log_likelihood_of(design * candidate, y);
            if (new_ll >= ll - 1e-12) break;
            step *= 0.5;
        }
        const double max_update = (step * delta).cwiseAbs().maxCoeff();
        beta = candidate;
        eta = design * beta;
        ll = new_ll;

        if (beta.cwiseAbs().maxCoeff() > kSeparationBound) {
            model.separation = true;
            break;
        }
        if (max_update < tol) {
            model.converged = true;
            break;
        }
    }

    for (Eigen::Index i = 0; i < Eigen::Index(n); ++i) {
        prob[i] = 1.0 / (1.0 + std::exp(-eta[i]));
        w[i] = std::max(prob[i] * (1.0 - prob[i]), kWeightFloor);
    }
    const Eigen::MatrixXd information = design.transpose() * w.asDiagonal() * design;
    const Eigen::MatrixXd cov = information.inverse();

    model.log_likelihood = ll;
    model.coefficients.assign(beta.data(), beta.data() + p);
    model.covariance.resize(p * p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            model.covariance[i * p + j] = cov(Eigen::Index(i), Eigen::Index(j));
    return model;
}

std::vector<WaldRow> wald_table(const LogitModel& model, bool include_intercept) {
    if (!model.converged)
        throw ValidationError(model.separation
                                  ? "model did not converge: separation detected"
                                  : "model did not converge within the iteration limit");
    std::vector<WaldRow> rows;
    const std::size_t p = model.coefficients.size();
    for (std::size_t i = include_intercept ? 0 : 1; i < p; ++i) {
        WaldRow row;
        row.variable = model.coefficient_names[i];
        row.beta = model.coefficients[i];
        row.standard_error = std::sqrt(model.covariance_at(i, i));
        row.wald_statistic = (row.beta / row.standard_error) * (row.beta / row.standard_error);
        row.p_value = chi2_sf(row.wald_statistic, 1.0);
        row.odds_ratio = std::exp(row.beta);
        rows.push_back(std::move(row));
    }
    return rows;
}

const char* significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

double nagelkerke_r2(const LogitModel& model) {
    if (model.n == 0) throw ValidationError("Nagelkerke R2 needs a fitted model with n > 0");
    const double n = double(model.n);
    const double cox_snell =
        1.0 - std::exp(2.0 * (model.null_log_likelihood - model.log_likelihood) / n);
    const double ceiling = 1.0 - std::exp(2.0 * model.null_log_likelihood / n);
    return cox_snell / ceiling;
}

double predict_logit(const LogitModel& model, const std::vector<double>& x) {
    if (x.size() + 1 != model.coefficients.size())
        throw ValidationError("feature vector length does not match the model");
    double eta = model.coefficients[0];
    for (std::size_t i = 0; i < x.size(); ++i) eta += model.coefficients[i + 1] * x[i];
    return 1.0 / (1.0 + std::exp(-eta));
}

}  // namespace fp
