#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fp/features.hpp"
#include "fp/logreg.hpp"
#include "fp/matrix.hpp"
#include "fp/rng.hpp"

namespace fp {

// ---------------------------------------------------------------- trees ----

// Flattened binary regression tree. feature == -1 marks a leaf. Rows with
// value <= threshold descend left.
struct Tree {
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    std::vector<Node> nodes;

    bool empty() const { return nodes.empty(); }
    double predict(const double* row) const;
};

struct GrowParams {
    int max_depth = 6;
    double min_leaf = 1.0;  // minimum summed row weight per side
    int mtry = 0;           // features sampled per split; 0 = all
};

// Greedy variance-reduction grower over presorted feature indices. Sorting
// happens once per grower; node descent partitions the index arrays, so a
// GBM reuses one grower across all of its boosting iterations.
class TreeGrower {
  public:
    explicit TreeGrower(const Matrix& x);

    struct GrownTree {
        Tree tree;
        std::vector<int> leaf_of_row;  // node index per training row; -1 if unused
    };

    // weights: per-row multiplicity (bootstrap); empty means all-ones.
    // rng is only consulted when params.mtry is in effect.
    GrownTree grow(const std::vector<double>& targets, const GrowParams& params,
                   const std::vector<double>& weights = {}, Rng* rng = nullptr) const;

  private:
    const Matrix& x_;
    std::vector<std::vector<int>> sorted_;  // per feature, row ids sorted by value
};

Tree fit_regression_tree(const Matrix& x, const std::vector<double>& targets,
                         const GrowParams& params, Rng* rng = nullptr);

// ------------------------------------------------------------------ GBM ----

struct GbmParams {
    int n_trees = 100;
    int max_depth = 6;
    double shrinkage = 0.1;
    double min_leaf = 10.0;
};

struct GbmModel {
    double initial_score = 0.0;  // log-odds of the training prevalence
    double shrinkage = 0.1;
    std::vector<Tree> trees;
    std::vector<double> train_deviance;  // mean binomial deviance per iteration

    double predict(const double* row) const;
};

// Stagewise trees on the binomial-deviance gradient (residual y - p) with a
// single Newton step per leaf. Training deviance is non-increasing.
GbmModel fit_gbm(const Matrix& x, const std::vector<char>& y, const GbmParams& params);

// ------------------------------------------------------- random forest ----

struct RfParams {
    int n_trees = 500;
    int mtry = 3;
    double min_leaf = 5.0;
    int max_depth = 25;
};

struct RfModel {
    std::vector<Tree> trees;
    int mtry = 0;

    double predict(const double* row) const;  // mean per-tree leaf class fraction
};

RfModel fit_rf(const Matrix& x, const std::vector<char>& y, const RfParams& params,
               std::uint64_t seed, int threads = 1);

// ------------------------------------------------------------------ kNN ----

struct KnnModel {
    int k = 1;
    Scaler scaler;
    Matrix train;  // scaled rows
    std::vector<char> labels;

    // Fraction of positive labels among the k nearest by Euclidean distance
    // on scaled features; distance ties resolved by lower training-row index.
    double predict(const std::vector<double>& raw_row) const;
};

KnnModel fit_knn(const Matrix& x, const std::vector<char>& y, int k);

// ---------------------------------------------------------- naive Bayes ----

struct NbModel {
    struct Feature {
        // Gaussian mode
        double mean = 0.0;
        double sd = 1.0;
        // kernel mode: Gaussian kernels at the training values
        std::vector<double> samples;
        double bandwidth = 0.0;
    };
    bool kernel = false;
    double priors[2] = {0.5, 0.5};
    std::vector<Feature> per_class[2];  // one entry per feature

    double predict(const std::vector<double>& row) const;  // P(label = 1 | row)
};

// kernel=false: per-class Gaussian densities (SD floor 1e-9); kernel=true:
// Gaussian kernel densities with Silverman's-rule bandwidth times `adjust`.
NbModel fit_nb(const Matrix& x, const std::vector<char>& y, bool kernel, double adjust = 1.0);

// ------------------------------------------------------------------ AUC ----

// Mann-Whitney AUC with midranks for ties: P(score_pos > score_neg) + 0.5 ties.
double auc(const std::vector<double>& scores, const std::vector<char>& labels);

// --------------------------------------------------- cross-validation ----

using ParamMap = std::map<std::string, double>;

struct LearnerSpec {
    std::string family;  // gbm | rf | knn | nb | logit | constant | oracle
    ParamMap params;
};

std::string format_params(const ParamMap& params);

// Prevalence scorer, the no-information baseline.
struct ConstantModel {
    double value = 0.5;
};

using FittedModel = std::variant<ConstantModel, GbmModel, RfModel, KnnModel, NbModel, LogitModel>;

// Fits one learner on the whole matrix; spec.family picks the branch and
// missing required parameters raise ValidationError.
FittedModel fit_model(const LearnerSpec& spec, const Matrix& x, const std::vector<char>& y,
                      std::uint64_t seed, int threads = 1);

// P(label = 1) for one feature row of the given width.
double score_row(const FittedModel& model, const double* row, std::size_t width);

std::string family_of(const FittedModel& model);

// Fits the learner on the training rows of x and scores the test rows.
// Scalers and any other preprocessing are fitted on the training rows only.
std::vector<double> fit_and_score(const LearnerSpec& spec, const Matrix& x,
                                  const std::vector<char>& y, const std::vector<int>& train_idx,
                                  const std::vector<int>& test_idx, std::uint64_t seed,
                                  int threads = 1);

struct CvConfig {
    int k = 10;
    int repeats = 5;
    std::uint64_t seed = 0;
    int threads = 1;
};

// fold id per row, one vector per repeat; round-robin within each class so
// every fold holds both classes whenever the minority class has >= k rows.
std::vector<std::vector<int>> stratified_folds(const std::vector<char>& y, int k, int repeats,
                                               std::uint64_t seed);

struct CvResult {
    std::string family;
    ParamMap params;
    std::vector<double> fold_aucs;  // repeat-major, k per repeat
    double mean_auc = 0.0;
    double sd_auc = 0.0;
};

CvResult cross_validate(const LearnerSpec& spec, const Matrix& x, const std::vector<char>& y,
                        const CvConfig& cv);

// Same, with fold assignments supplied so several grid points share them.
CvResult cross_validate_with_folds(const LearnerSpec& spec, const Matrix& x,
                                   const std::vector<char>& y, const CvConfig& cv,
                                   const std::vector<std::vector<int>>& folds);

// ----------------------------------------------------------- grid search ----

struct FamilyGrid {
    std::string family;
    std::vector<ParamMap> points;  // cartesian expansion in listed order
};

// Text config: one [family] section per model family, each key a
// comma-separated value list; points expand with later keys cycling fastest.
std::vector<FamilyGrid> parse_grid_config(const std::string& text, const std::string& source_name);
std::vector<FamilyGrid> load_grid_config(const std::string& path);

struct GridFailure {
    std::string family;
    ParamMap params;
    std::string message;
};

struct GridSearchResult {
    std::vector<CvResult> evaluated;      // every successful grid point
    std::vector<GridFailure> failures;    // grid points that errored
    std::vector<CvResult> family_best;    // best point per family, grid order
    int best_index = -1;                  // into family_best

    const CvResult& best() const;
};

// Evaluates every grid point under identical fold assignments (paired
// comparisons); ranks by mean AUC with ties broken by the family's
// complexity parameter, then by listed order.
GridSearchResult grid_search(const std::vector<FamilyGrid>& grids, const Matrix& x,
                             const std::vector<char>& y, const CvConfig& cv);

}  // namespace fp
