#include "fp/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fp/logreg.hpp"
#include "fp/parallel.hpp"
#include "fp/stats.hpp"

namespace fp {
namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double log1p_exp(double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

// Threshold between two adjacent distinct values a < b such that a <= thr < b.
double midpoint_threshold(double a, double b) {
    const double m = a + 0.5 * (b - a);
    return m < b ? m : a;
}

}  // namespace

// ---------------------------------------------------------------- trees ----

double Tree::predict(const double* row) const {
    int i = 0;
    while (nodes[std::size_t(i)].feature >= 0) {
        const Node& n = nodes[std::size_t(i)];
        i = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[std::size_t(i)].value;
}

TreeGrower::TreeGrower(const Matrix& x) : x_(x) {
    sorted_.resize(x.cols());
    for (std::size_t f = 0; f < x.cols(); ++f) {
        auto& idx = sorted_[f];
        idx.resize(x.rows());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return x.at(std::size_t(a), f) < x.at(std::size_t(b), f); });
    }
}

namespace {

struct NodeWork {
    std::vector<std::vector<int>> arrays;  // per feature, node rows sorted by value
    double sum = 0.0;
    double weight = 0.0;
    int depth = 0;
    int node_index = 0;
};

}  // namespace

TreeGrower::GrownTree TreeGrower::grow(const std::vector<double>& targets, const GrowParams& params,
                                       const std::vector<double>& weights, Rng* rng) const {
    const std::size_t n = x_.rows();
    const std::size_t p = x_.cols();
    if (targets.size() != n) throw ValidationError("target vector length does not match the matrix");
    if (!weights.empty() && weights.size() != n)
        throw ValidationError("weight vector length does not match the matrix");
    if (params.min_leaf < 1.0) throw ValidationError("min_leaf must be at least 1");
    if (params.mtry < 0 || params.mtry > int(p)) throw ValidationError("mtry out of range");
    if (params.mtry > 0 && rng == nullptr)
        throw ValidationError("feature subsampling requires a random generator");

    auto w_of = [&](int r) { return weights.empty() ? 1.0 : weights[std::size_t(r)]; };

    GrownTree out;
    out.leaf_of_row.assign(n, -1);

    NodeWork root;
    root.arrays.resize(p);
    for (std::size_t f = 0; f < p; ++f) {
        root.arrays[f].reserve(n);
        for (int r : sorted_[f])
            if (w_of(r) > 0.0) root.arrays[f].push_back(r);
    }
    if (root.arrays.empty() || root.arrays[0].empty())
        throw ValidationError("cannot grow a tree on an empty row set");
    for (int r : root.arrays[0]) {
        root.sum += w_of(r) * targets[std::size_t(r)];
        root.weight += w_of(r);
    }
    out.tree.nodes.emplace_back();
    root.node_index = 0;

    std::vector<int> feature_scratch(p);
    std::iota(feature_scratch.begin(), feature_scratch.end(), 0);

    std::vector<NodeWork> stack;
    stack.push_back(std::move(root));
    while (!stack.empty()) {
        NodeWork node = std::move(stack.back());
        stack.pop_back();
        auto& tree_node = out.tree.nodes[std::size_t(node.node_index)];
        tree_node.value = node.sum / node.weight;

        auto make_leaf = [&] {
            tree_node.feature = -1;
            for (int r : node.arrays[0]) out.leaf_of_row[std::size_t(r)] = node.node_index;
        };
        if (node.depth >= params.max_depth || node.weight < 2.0 * params.min_leaf) {
            make_leaf();
            continue;
        }

        // candidate features: all, or an mtry-sized sample (sorted so that
        // score ties always resolve to the lowest feature index)
        const int n_candidates = params.mtry > 0 ? params.mtry : int(p);
        if (params.mtry > 0) {
            for (int i = 0; i < params.mtry; ++i) {
                const auto j = i + int(uniform_below(*rng, std::uint64_t(int(p) - i)));
                std::swap(feature_scratch[std::size_t(i)], feature_scratch[std::size_t(j)]);
            }
            std::sort(feature_scratch.begin(), feature_scratch.begin() + params.mtry);
        }

        const double parent_score = node.sum * node.sum / node.weight;
        double best_score = parent_score + 1e-12 * (1.0 + std::abs(parent_score));
        int best_feature = -1;
        double best_threshold = 0.0;
        for (int ci = 0; ci < n_candidates; ++ci) {
            const std::size_t f = std::size_t(feature_scratch[std::size_t(ci)]);
            const auto& idx = node.arrays[f];
            double left_sum = 0.0, left_weight = 0.0;
            for (std::size_t i = 1; i < idx.size(); ++i) {
                const int prev = idx[i - 1];
                left_sum += w_of(prev) * targets[std::size_t(prev)];
                left_weight += w_of(prev);
                const double a = x_.at(std::size_t(prev), f);
                const double b = x_.at(std::size_t(idx[i]), f);
                if (a == b) continue;
                const double right_weight = node.weight - left_weight;
                if (left_weight < params.min_leaf || right_weight < params.min_leaf) continue;
                const double right_sum = node.sum - left_sum;
                const double score =
                    left_sum * left_sum / left_weight + right_sum * right_sum / right_weight;
                if (score > best_score) {
                    best_score = score;
                    best_feature = int(f);
                    best_threshold = midpoint_threshold(a, b);
                }
            }
        }
        if (best_feature < 0) {
            make_leaf();
            continue;
        }

        NodeWork left, right;
        left.depth = right.depth = node.depth + 1;
        left.arrays.resize(p);
        right.arrays.resize(p);
        for (std::size_t f = 0; f < p; ++f) {
            left.arrays[f].reserve(node.arrays[f].size());
            right.arrays[f].reserve(node.arrays[f].size());
            for (int r : node.arrays[f]) {
                if (x_.at(std::size_t(r), std::size_t(best_feature)) <= best_threshold)
                    left.arrays[f].push_back(r);
                else
                    right.arrays[f].push_back(r);
            }
        }
        for (int r : left.arrays[0]) {
            left.sum += w_of(r) * targets[std::size_t(r)];
            left.weight += w_of(r);
        }
        right.sum = node.sum - left.sum;
        right.weight = node.weight - left.weight;

        tree_node.feature = best_feature;
        tree_node.threshold = best_threshold;
        left.node_index = int(out.tree.nodes.size());
        out.tree.nodes.emplace_back();
        right.node_index = int(out.tree.nodes.size());
        out.tree.nodes.emplace_back();
        // emplace_back may reallocate: re-resolve the reference
        out.tree.nodes[std::size_t(node.node_index)].left = left.node_index;
        out.tree.nodes[std::size_t(node.node_index)].right = right.node_index;
        stack.push_back(std::move(right));
        stack.push_back(std::move(left));
    }
    return out;
}

Tree fit_regression_tree(const Matrix& x, const std::vector<double>& targets,
                         const GrowParams& params, Rng* rng) {
    if (double(x.rows()) < 2.0 * params.min_leaf && x.rows() > 0) {
        // Degenerate by contract: a single leaf holding the mean target.
        Tree t;
        t.nodes.emplace_back();
        t.nodes[0].value = std::accumulate(targets.begin(), targets.end(), 0.0) / double(x.rows());
        return t;
    }
    TreeGrower grower(x);
    return grower.grow(targets, params, {}, rng).tree;
}

// ------------------------------------------------------------------ GBM ----

double GbmModel::predict(const double* row) const {
    double f = initial_score;
    for (const auto& tree : trees) f += shrinkage * tree.predict(row);
    return sigmoid(f);
}

GbmModel fit_gbm(const Matrix& x, const std::vector<char>& y, const GbmParams& params) {
    const std::size_t n = x.rows();
    if (n == 0 || y.size() != n) throw ValidationError("labels do not match the matrix");
    if (params.n_trees < 0) throw ValidationError("n_trees must be >= 0");
    if (params.max_depth < 1) throw ValidationError("max_depth must be >= 1");
    if (!(params.shrinkage > 0.0 && params.shrinkage <= 1.0))
        throw ValidationError("shrinkage must be in (0,1]");
    if (params.min_leaf < 1.0) throw ValidationError("min_leaf must be at least 1");
    const std::size_t n_pos = std::size_t(std::count(y.begin(), y.end(), char(1)));
    if (n_pos == 0 || n_pos == n) throw ValidationError("training labels contain a single class");

    GbmModel model;
    model.shrinkage = params.shrinkage;
    const double prevalence = double(n_pos) / double(n);
    model.initial_score = std::log(prevalence / (1.0 - prevalence));
    model.trees.reserve(std::size_t(params.n_trees));

    std::vector<double> score(n, model.initial_score);
    auto mean_deviance = [&] {
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i) dev += 2.0 * log1p_exp(y[i] ? -score[i] : score[i]);
        return dev / double(n);
    };
    model.train_deviance.push_back(mean_deviance());

    const TreeGrower grower(x);
    const GrowParams grow{params.max_depth, params.min_leaf, 0};
    std::vector<double> residual(n), hessian(n);
    for (int t = 0; t < params.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(score[i]);
            residual[i] = (y[i] ? 1.0 : 0.0) - p;
            hessian[i] = p * (1.0 - p);
        }
        auto grown = grower.grow(residual, grow);
        // one Newton step per leaf: sum residual / sum p(1-p)
        std::vector<double> num(grown.tree.nodes.size(), 0.0);
        std::vector<double> den(grown.tree.nodes.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const int leaf = grown.leaf_of_row[i];
            num[std::size_t(leaf)] += residual[i];
            den[std::size_t(leaf)] += hessian[i];
        }
        for (auto& node : grown.tree.nodes)
            if (node.feature < 0) {
                const std::size_t id = std::size_t(&node - grown.tree.nodes.data());
                node.value = num[id] / std::max(den[id], 1e-12);
            }
        for (std::size_t i = 0; i < n; ++i)
            score[i] += params.shrinkage * grown.tree.nodes[std::size_t(grown.leaf_of_row[i])].value;
        model.trees.push_back(std::move(grown.tree));
        model.train_deviance.push_back(mean_deviance());
    }
    return model;
}

// ------------------------------------------------------- random forest ----

double RfModel::predict(const double* row) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(row);
    return sum / double(trees.size());
}

RfModel fit_rf(const Matrix& x, const std::vector<char>& y, const RfParams& params,
               std::uint64_t seed, int threads) {
    const std::size_t n = x.rows();
    if (n == 0 || y.size() != n) throw ValidationError("labels do not match the matrix");
    if (params.n_trees < 1) throw ValidationError("n_trees must be >= 1");
    if (params.mtry < 1 || params.mtry > int(x.cols()))
        throw ValidationError("mtry must be in 1..p");
    const std::size_t n_pos = std::size_t(std::count(y.begin(), y.end(), char(1)));
    if (n_pos == 0 || n_pos == n) throw ValidationError("training labels contain a single class");

    std::vector<double> targets(n);
    for (std::size_t i = 0; i < n; ++i) targets[i] = y[i] ? 1.0 : 0.0;

    const TreeGrower grower(x);
    const GrowParams grow{params.max_depth, params.min_leaf, params.mtry};
    RfModel model;
    model.mtry = params.mtry;
    model.trees.resize(std::size_t(params.n_trees));
    parallel_for(std::size_t(params.n_trees), threads, [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        std::vector<double> weights(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) weights[uniform_below(rng, n)] += 1.0;
        model.trees[t] = grower.grow(targets, grow, weights, &rng).tree;
    });
    return model;
}

// ------------------------------------------------------------------ kNN ----

KnnModel fit_knn(const Matrix& x, const std::vector<char>& y, int k) {
    if (x.rows() == 0 || y.size() != x.rows()) throw ValidationError("labels do not match the matrix");
    if (k < 1 || std::size_t(k) > x.rows()) throw ValidationError("k must be in 1..n_train");
    KnnModel model;
    model.k = k;
    model.scaler = Scaler::fit(x);
    model.train = model.scaler.apply(x);
    model.labels = y;
    return model;
}

double KnnModel::predict(const std::vector<double>& raw_row) const {
    const auto q = scaler.apply(raw_row);
    const std::size_t n = train.rows();
    std::vector<std::pair<double, int>> dist(n);
    for (std::size_t r = 0; r < n; ++r) {
        double d2 = 0.0;
        const double* row = train.row(r);
        for (std::size_t c = 0; c < q.size(); ++c) {
            const double d = q[c] - row[c];
            d2 += d * d;
        }
        dist[r] = {d2, int(r)};
    }
    const std::size_t kk = std::size_t(k);
    std::nth_element(dist.begin(), dist.begin() + long(kk) - 1, dist.end());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < kk; ++i) positives += labels[std::size_t(dist[i].second)] ? 1 : 0;
    return double(positives) / double(kk);
}

// ---------------------------------------------------------- naive Bayes ----

NbModel fit_nb(const Matrix& x, const std::vector<char>& y, bool kernel, double adjust) {
    const std::size_t n = x.rows();
    if (n == 0 || y.size() != n) throw ValidationError("labels do not match the matrix");
    if (!(adjust > 0.0)) throw ValidationError("bandwidth adjustment must be > 0");
    const std::size_t n_pos = std::size_t(std::count(y.begin(), y.end(), char(1)));
    if (n_pos == 0 || n_pos == n) throw ValidationError("training labels contain a single class");

    NbModel model;
    model.kernel = kernel;
    model.priors[1] = double(n_pos) / double(n);
    model.priors[0] = 1.0 - model.priors[1];
    for (int cls = 0; cls < 2; ++cls) {
        model.per_class[cls].resize(x.cols());
        for (std::size_t f = 0; f < x.cols(); ++f) {
            std::vector<double> values;
            values.reserve(cls ? n_pos : n - n_pos);
            for (std::size_t r = 0; r < n; ++r)
                if (int(y[r]) == cls) values.push_back(x.at(r, f));
            std::sort(values.begin(), values.end());
            auto& feat = model.per_class[cls][f];
            feat.mean = mean_of(values);
            feat.sd = std::max(sample_sd(values), 1e-9);
            if (kernel) {
                const double sd = sample_sd(values);
                const double iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
                double spread = std::min(sd, iqr / 1.34);
                if (spread <= 0.0) spread = std::max(sd, iqr / 1.34);
                double h = 0.9 * spread * std::pow(double(values.size()), -0.2) * adjust;
                feat.bandwidth = h > 0.0 ? h : 1e-9;
                feat.samples = std::move(values);
            }
        }
    }
    return model;
}

double NbModel::predict(const std::vector<double>& row) const {
    if (row.size() != per_class[0].size()) throw ValidationError("feature count mismatch");
    double score[2];
    for (int cls = 0; cls < 2; ++cls) {
        double s = std::log(priors[cls]);
        for (std::size_t f = 0; f < row.size(); ++f) {
            const auto& feat = per_class[cls][f];
            if (!kernel) {
                const double z = (row[f] - feat.mean) / feat.sd;
                s += -0.5 * z * z - std::log(feat.sd) - 0.9189385332046727;  // log sqrt(2*pi)
            } else {
                double emax = -std::numeric_limits<double>::infinity();
                for (double v : feat.samples) {
                    const double z = (row[f] - v) / feat.bandwidth;
                    emax = std::max(emax, -0.5 * z * z);
                }
                double acc = 0.0;
                for (double v : feat.samples) {
                    const double z = (row[f] - v) / feat.bandwidth;
                    acc += std::exp(-0.5 * z * z - emax);
                }
                s += emax + std::log(acc) - std::log(double(feat.samples.size())) -
                     std::log(feat.bandwidth) - 0.9189385332046727;
            }
        }
        score[cls] = s;
    }
    const double m = std::max(score[0], score[1]);
    const double e0 = std::exp(score[0] - m), e1 = std::exp(score[1] - m);
    return e1 / (e0 + e1);
}

// ------------------------------------------------------------------ AUC ----

double auc(const std::vector<double>& scores, const std::vector<char>& labels) {
    const std::size_t n = scores.size();
    if (labels.size() != n) throw ValidationError("labels do not match the scores");
    const std::size_t n_pos = std::size_t(std::count(labels.begin(), labels.end(), char(1)));
    if (n_pos == 0 || n_pos == n) throw ValidationError("AUC needs both classes");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[std::size_t(a)] < scores[std::size_t(b)]; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[std::size_t(order[j])] == scores[std::size_t(order[i])]) ++j;
        const double midrank = 0.5 * (double(i + 1) + double(j));  // ranks are 1-based
        for (std::size_t t = i; t < j; ++t)
            if (labels[std::size_t(order[t])]) rank_sum_pos += midrank;
        i = j;
    }
    const double n1 = double(n_pos), n0 = double(n - n_pos);
    const double u = rank_sum_pos - n1 * (n1 + 1.0) / 2.0;
    return u / (n1 * n0);
}

// --------------------------------------------------- cross-validation ----

std::string format_params(const ParamMap& params) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [key, value] : params) {
        if (!first) out << "; ";
        first = false;
        out << key << ": " << format_double_exact(value);
    }
    return out.str();
}

namespace {

double require_param(const ParamMap& params, const std::string& name, const std::string& family) {
    auto it = params.find(name);
    if (it == params.end())
        throw ValidationError("family '" + family + "' needs parameter '" + name + "'");
    return it->second;
}

double param_or(const ParamMap& params, const std::string& name, double fallback) {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
}

int int_param(double v, const std::string& name) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) throw ValidationError("parameter '" + name + "' must be an integer");
    return int(r);
}

Matrix gather_rows(const Matrix& x, const std::vector<int>& idx) {
    Matrix out(idx.size(), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::copy(x.row(std::size_t(idx[i])), x.row(std::size_t(idx[i])) + x.cols(), out.row(i));
    return out;
}

std::vector<char> gather_labels(const std::vector<char>& y, const std::vector<int>& idx) {
    std::vector<char> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[std::size_t(idx[i])];
    return out;
}

}  // namespace

FittedModel fit_model(const LearnerSpec& spec, const Matrix& x, const std::vector<char>& y,
                      std::uint64_t seed, int threads) {
    if (spec.family == "gbm") {
        GbmParams p;
        p.n_trees = int_param(require_param(spec.params, "n_trees", "gbm"), "n_trees");
        p.max_depth = int_param(require_param(spec.params, "max_depth", "gbm"), "max_depth");
        p.shrinkage = require_param(spec.params, "shrinkage", "gbm");
        p.min_leaf = param_or(spec.params, "min_leaf", 10.0);
        return fit_gbm(x, y, p);
    }
    if (spec.family == "rf") {
        RfParams p;
        p.n_trees = int_param(param_or(spec.params, "n_trees", 500.0), "n_trees");
        p.mtry = int_param(require_param(spec.params, "mtry", "rf"), "mtry");
        p.min_leaf = param_or(spec.params, "min_leaf", 5.0);
        p.max_depth = int_param(param_or(spec.params, "max_depth", 25.0), "max_depth");
        return fit_rf(x, y, p, seed, threads);
    }
    if (spec.family == "knn")
        return fit_knn(x, y, int_param(require_param(spec.params, "k", "knn"), "k"));
    if (spec.family == "nb") {
        const bool kernel = int_param(param_or(spec.params, "kernel", 1.0), "kernel") != 0;
        return fit_nb(x, y, kernel, param_or(spec.params, "adjust", 1.0));
    }
    if (spec.family == "logit") {
        std::vector<std::string> names(x.cols());
        for (std::size_t c = 0; c < x.cols(); ++c) names[c] = "f" + std::to_string(c);
        return fit_logit(x, y, names, int(param_or(spec.params, "max_iter", 100.0)), 1e-8);
    }
    if (spec.family == "constant") {
        if (y.empty()) throw ValidationError("labels do not match the matrix");
        ConstantModel m;
        m.value = double(std::count(y.begin(), y.end(), char(1))) / double(y.size());
        return m;
    }
    throw ValidationError("unknown model family '" + spec.family + "'");
}

double score_row(const FittedModel& model, const double* row, std::size_t width) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) return m.value;
            else if constexpr (std::is_same_v<T, GbmModel>) return m.predict(row);
            else if constexpr (std::is_same_v<T, RfModel>) return m.predict(row);
            else if constexpr (std::is_same_v<T, KnnModel>)
                return m.predict(std::vector<double>(row, row + width));
            else if constexpr (std::is_same_v<T, NbModel>)
                return m.predict(std::vector<double>(row, row + width));
            else return predict_logit(m, std::vector<double>(row, row + width));
        },
        model);
}

std::string family_of(const FittedModel& model) {
    static const char* names[] = {"constant", "gbm", "rf", "knn", "nb", "logit"};
    return names[model.index()];
}

std::vector<double> fit_and_score(const LearnerSpec& spec, const Matrix& x,
                                  const std::vector<char>& y, const std::vector<int>& train_idx,
                                  const std::vector<int>& test_idx, std::uint64_t seed,
                                  int threads) {
    std::vector<double> scores(test_idx.size());
    if (spec.family == "oracle") {
        // test utility: scores equal the true labels
        for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = y[std::size_t(test_idx[i])];
        return scores;
    }
    const Matrix xtr = gather_rows(x, train_idx);
    const FittedModel m = fit_model(spec, xtr, gather_labels(y, train_idx), seed, threads);
    for (std::size_t i = 0; i < scores.size(); ++i)
        scores[i] = score_row(m, x.row(std::size_t(test_idx[i])), x.cols());
    return scores;
}

std::vector<std::vector<int>> stratified_folds(const std::vector<char>& y, int k, int repeats,
                                               std::uint64_t seed) {
    if (k < 2) throw ValidationError("cross-validation needs k >= 2");
    if (repeats < 1) throw ValidationError("cross-validation needs repeats >= 1");
    std::vector<int> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(int(i));
    const std::size_t minority = std::min(pos.size(), neg.size());
    if (minority < std::size_t(k))
        throw ValidationError("minority class smaller than the fold count");

    std::vector<std::vector<int>> folds(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        auto& assignment = folds[std::size_t(r)];
        assignment.assign(y.size(), 0);
        int cls = 0;
        for (auto* indices : {&pos, &neg}) {
            std::vector<int> order = *indices;
            Rng rng(mix_seed(seed, std::uint64_t(r), std::uint64_t(cls++)));
            shuffle_vec(order, rng);
            for (std::size_t i = 0; i < order.size(); ++i)
                assignment[std::size_t(order[i])] = int(i % std::size_t(k));
        }
    }
    return folds;
}

CvResult cross_validate(const LearnerSpec& spec, const Matrix& x, const std::vector<char>& y,
                        const CvConfig& cv) {
    return cross_validate_with_folds(spec, x, y, cv, stratified_folds(y, cv.k, cv.repeats, cv.seed));
}

CvResult cross_validate_with_folds(const LearnerSpec& spec, const Matrix& x,
                                   const std::vector<char>& y, const CvConfig& cv,
                                   const std::vector<std::vector<int>>& folds) {
    if (x.rows() != y.size()) throw ValidationError("labels do not match the matrix");
    if (folds.size() != std::size_t(cv.repeats))
        throw ValidationError("fold assignments do not match the repeat count");
    CvResult result;
    result.family = spec.family;
    result.params = spec.params;
    const std::size_t units = std::size_t(cv.repeats) * std::size_t(cv.k);
    result.fold_aucs.assign(units, 0.0);
    parallel_for(units, cv.threads, [&](std::size_t u) {
        const int r = int(u) / cv.k;
        const int f = int(u) % cv.k;
        const auto& assignment = folds[std::size_t(r)];
        std::vector<int> train_idx, test_idx;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            (assignment[i] == f ? test_idx : train_idx).push_back(int(i));
        const auto scores =
            fit_and_score(spec, x, y, train_idx, test_idx, mix_seed(cv.seed, 0x666F6C64ull, u), 1);
        result.fold_aucs[u] = auc(scores, gather_labels(y, test_idx));
    });
    result.mean_auc = mean_of(result.fold_aucs);
    result.sd_auc = sample_sd(result.fold_aucs);
    return result;
}

// ----------------------------------------------------------- grid search ----

namespace {

const std::vector<std::string>& known_families() {
    static const std::vector<std::string> families = {"gbm", "rf", "knn", "nb", "logit", "constant"};
    return families;
}

// Parameter used to break mean-AUC ties: simpler models win.
double complexity_of(const CvResult& r) {
    if (r.family == "gbm" || r.family == "rf") return param_or(r.params, "n_trees", 0.0);
    if (r.family == "knn") return param_or(r.params, "k", 0.0);
    return 0.0;
}

}  // namespace

std::vector<FamilyGrid> parse_grid_config(const std::string& text, const std::string& source_name) {
    std::vector<FamilyGrid> grids;
    std::vector<std::pair<std::string, std::vector<double>>> keys;  // current section
    std::string family;

    auto flush = [&] {
        if (family.empty()) return;
        FamilyGrid grid;
        grid.family = family;
        grid.points.push_back({});
        for (const auto& [key, values] : keys) {
            std::vector<ParamMap> expanded;
            expanded.reserve(grid.points.size() * values.size());
            for (const auto& point : grid.points)
                for (double v : values) {
                    ParamMap next = point;
                    next[key] = v;
                    expanded.push_back(std::move(next));
                }
            grid.points = std::move(expanded);
            if (grid.points.size() > 10000)
                throw ValidationError(source_name + ": grid for '" + family +
                                      "' expands past 10000 points");
        }
        grids.push_back(std::move(grid));
        keys.clear();
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        if (sv.front() == '[') {
            if (sv.back() != ']')
                throw ParseError(source_name + ":" + std::to_string(line_no) + ": unclosed section");
            flush();
            family = std::string(trim(sv.substr(1, sv.size() - 2)));
            const auto& known = known_families();
            if (std::find(known.begin(), known.end(), family) == known.end())
                throw ParseError(source_name + ":" + std::to_string(line_no) +
                                 ": unknown model family '" + family + "'");
            continue;
        }
        if (family.empty())
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": parameter outside a [family] section");
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": expected key = values");
        const std::string key(trim(sv.substr(0, eq)));
        if (key.empty())
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": empty parameter name");
        for (const auto& [existing, _] : keys)
            if (existing == key)
                throw ParseError(source_name + ":" + std::to_string(line_no) +
                                 ": duplicate parameter '" + key + "'");
        std::vector<double> values;
        for (const auto& cell : split(sv.substr(eq + 1), ',')) {
            const std::string v(trim(cell));
            if (v.empty()) continue;
            char* end = nullptr;
            const double parsed = std::strtod(v.c_str(), &end);
            if (end == v.c_str() || *end != '\0')
                throw ParseError(source_name + ":" + std::to_string(line_no) +
                                 ": bad numeric value '" + v + "'");
            values.push_back(parsed);
        }
        if (values.empty())
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": parameter '" + key + "' lists no values");
        keys.emplace_back(key, std::move(values));
    }
    flush();
    if (grids.empty()) throw ValidationError(source_name + ": grid config lists no model family");
    return grids;
}

std::vector<FamilyGrid> load_grid_config(const std::string& path) {
    return parse_grid_config(read_text_file(path), path);
}

const CvResult& GridSearchResult::best() const {
    if (best_index < 0) throw ValidationError("grid search produced no successful result");
    return family_best[std::size_t(best_index)];
}

GridSearchResult grid_search(const std::vector<FamilyGrid>& grids, const Matrix& x,
                             const std::vector<char>& y, const CvConfig& cv) {
    if (grids.empty()) throw ValidationError("empty grid");
    const auto folds = stratified_folds(y, cv.k, cv.repeats, cv.seed);

    GridSearchResult result;
    // Strictly better when the mean is higher; ties prefer the simpler model.
    auto better = [](const CvResult& a, const CvResult& b) {
        if (a.mean_auc != b.mean_auc) return a.mean_auc > b.mean_auc;
        return complexity_of(a) < complexity_of(b);
    };
    for (const auto& grid : grids) {
        int best_point = -1;
        std::vector<CvResult> evaluated;
        for (const auto& point : grid.points) {
            LearnerSpec spec{grid.family, point};
            try {
                CvResult r = cross_validate_with_folds(spec, x, y, cv, folds);
                evaluated.push_back(std::move(r));
                if (best_point < 0 || better(evaluated.back(), evaluated[std::size_t(best_point)]))
                    best_point = int(evaluated.size()) - 1;
            } catch (const Error& e) {
                result.failures.push_back({grid.family, point, e.what()});
            }
        }
        for (auto& r : evaluated) result.evaluated.push_back(std::move(r));
        if (best_point >= 0) {
            // re-find in the flat list: it is the best of this family
            const CvResult* chosen = nullptr;
            for (const auto& r : result.evaluated)
                if (r.family == grid.family && (chosen == nullptr || better(r, *chosen))) chosen = &r;
            result.family_best.push_back(*chosen);
            if (result.best_index < 0 ||
                better(result.family_best.back(),
                       result.family_best[std::size_t(result.best_index)]))
                result.best_index = int(result.family_best.size()) - 1;
        }
    }
    if (result.best_index < 0 && result.evaluated.empty() && !result.failures.empty())
        throw ValidationError("every grid point failed: " + result.failures.front().message);
    return result;
}

}  // namespace fp
