#include "fp/router.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fp/parallel.hpp"

namespace fp {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kMagic = "FPRM";

// seed streams, one block per purpose so group indices never collide
constexpr std::uint64_t kSelectStream = 0x11;
constexpr std::uint64_t kRefitStream = 0x21;
constexpr std::uint64_t kGlobalSelect = 0x31;
constexpr std::uint64_t kGlobalRefit = 0x32;

}  // namespace

std::uint64_t labeled_fingerprint(const LabeledSet& labeled) {
    std::uint64_t h = fnv1a(format_date(labeled.ctx.crawl_date));
    for (const auto& r : labeled.records) {
        h = fnv1a(std::string_view(reinterpret_cast<const char*>(&r.profile.user_id),
                                   sizeof r.profile.user_id), h);
        h = fnv1a(r.profile.name_field, h);
        h = fnv1a(std::string_view(reinterpret_cast<const char*>(&r.profile.followers_count),
                                   sizeof r.profile.followers_count), h);
        h = fnv1a(std::string_view(reinterpret_cast<const char*>(&r.followers_second),
                                   sizeof r.followers_second), h);
        const char flag = r.increased ? 1 : 0;
        h = fnv1a(std::string_view(&flag, 1), h);
    }
    return h;
}

std::uint64_t grids_fingerprint(const std::vector<FamilyGrid>& grids) {
    std::string canon;
    for (const auto& grid : grids) {
        canon += '[';
        canon += grid.family;
        canon += ']';
        for (const auto& point : grid.points) {
            for (const auto& [key, value] : point) {
                canon += key;
                canon += '=';
                canon += format_double_exact(value);
                canon += ';';
            }
            canon += '|';
        }
    }
    return fnv1a(canon);
}

namespace {

GroupModelEntry train_entry(const FeatureMatrix& fm, const std::string& what,
                            const std::vector<FamilyGrid>& grids, const CvConfig& cv,
                            std::uint64_t select_seed, std::uint64_t refit_seed, int threads) {
    const std::size_t positives =
        std::size_t(std::count(fm.y.begin(), fm.y.end(), char(1)));
    if (fm.x.rows() == 0) throw ValidationError(what + ": no training rows");
    if (positives == 0 || positives == fm.y.size())
        throw ValidationError(what + ": training rows carry a single label");

    CvConfig group_cv = cv;
    group_cv.seed = select_seed;
    group_cv.threads = threads;
    GridSearchResult search = grid_search(grids, fm.x, fm.y, group_cv);

    GroupModelEntry entry;
    entry.schema = fm.schema;
    entry.selection = search.best();
    entry.spec = {entry.selection.family, entry.selection.params};
    entry.model = fit_model(entry.spec, fm.x, fm.y, refit_seed, threads);
    entry.train_rows = fm.x.rows();
    entry.train_positives = positives;
    return entry;
}

}  // namespace

RouterModel train_router(const LabeledSet& train, const NameLexicon& lexicon,
                         const WordList& words, const std::vector<FamilyGrid>& grids,
                         const CvConfig& cv, std::uint64_t seed, int threads, bool with_global) {
    if (train.records.empty()) throw ValidationError("router training set is empty");
    if (grids.empty()) throw ValidationError("router training needs a non-empty grid");

    std::vector<const LabeledProfile*> members[3];
    for (const auto& r : train.records)
        members[int(assign_group(r.profile.name_field, lexicon, words))].push_back(&r);

    RouterModel router;
    router.seed = seed;
    router.crawl_date = train.ctx.crawl_date;
    router.cv_k = cv.k;
    router.cv_repeats = cv.repeats;
    router.data_fingerprint = labeled_fingerprint(train);
    router.grid_fingerprint = grids_fingerprint(grids);
    router.lexicon_fingerprint = lexicon.fingerprint();
    router.wordlist_fingerprint = words.fingerprint();

    for (Group g : kAllGroups) {
        const int gi = int(g);
        const std::string what = "group '" + std::string(group_id(g)) + "'";
        if (members[gi].empty()) throw ValidationError(what + ": no training rows");
        const FeatureMatrix fm = extract_matrix(members[gi], FeatureSchema::for_group(g),
                                                train.ctx, lexicon, words);
        router.groups[gi] =
            train_entry(fm, what, grids, cv, mix_seed(seed, kSelectStream, std::uint64_t(gi)),
                        mix_seed(seed, kRefitStream, std::uint64_t(gi)), threads);
    }

    if (with_global) {
        std::vector<const LabeledProfile*> all;
        all.reserve(train.records.size());
        for (const auto& r : train.records) all.push_back(&r);
        const FeatureMatrix fm =
            extract_matrix(all, FeatureSchema::core(), train.ctx, lexicon, words);
        router.global = train_entry(fm, "global baseline", grids, cv, mix_seed(seed, kGlobalSelect),
                                    mix_seed(seed, kGlobalRefit), threads);
    }
    return router;
}

Classification classify(const RouterModel& router, const RawProfile& profile,
                        const CrawlContext& ctx, const NameLexicon& lexicon,
                        const WordList& words) {
    Classification result;
    result.group = assign_group(profile.name_field, lexicon, words);
    const GroupModelEntry& entry = router.groups[int(result.group)];
    const auto x = extract_values(profile, entry.schema, ctx, lexicon, words);
    result.probability = score_row(entry.model, x.data(), x.size());
    result.label = result.probability >= 0.5;
    return result;
}

double score_global(const RouterModel& router, const RawProfile& profile, const CrawlContext& ctx,
                    const NameLexicon& lexicon, const WordList& words) {
    if (!router.global) throw ValidationError("router carries no global baseline model");
    const auto x = extract_values(profile, router.global->schema, ctx, lexicon, words);
    return score_row(router.global->model, x.data(), x.size());
}

namespace {

GroupEval eval_slice(const std::vector<double>& scores, const std::vector<char>& labels) {
    GroupEval ev;
    ev.present = !scores.empty();
    ev.n = scores.size();
    ev.positives = std::size_t(std::count(labels.begin(), labels.end(), char(1)));
    if (ev.positives > 0 && ev.positives < ev.n) {
        ev.auc_defined = true;
        ev.auc = auc(scores, labels);
    }
    return ev;
}

}  // namespace

RouterEvaluation evaluate_router(const RouterModel& router, const LabeledSet& eval,
                                 const NameLexicon& lexicon, const WordList& words) {
    if (eval.records.empty()) throw ValidationError("evaluation set is empty");
    RouterEvaluation result;
    result.n = eval.records.size();
    result.has_global = router.global.has_value();
    result.rows.resize(result.n);
    const CrawlContext ctx = eval.ctx;

    parallel_for(result.n, 1, [&](std::size_t i) {
        const LabeledProfile& rec = eval.records[i];
        const Classification c = classify(router, rec.profile, ctx, lexicon, words);
        RouterEvaluation::Row& row = result.rows[i];
        row.user_id = rec.profile.user_id;
        row.group = c.group;
        row.label = rec.increased;
        row.p_routed = c.probability;
        row.p_global = result.has_global
                           ? score_global(router, rec.profile, ctx, lexicon, words)
                           : std::numeric_limits<double>::quiet_NaN();
    });

    std::vector<double> routed_scores[3], global_scores[3], routed_all, global_all;
    std::vector<char> labels[3], labels_all;
    for (const auto& row : result.rows) {
        const int gi = int(row.group);
        routed_scores[gi].push_back(row.p_routed);
        labels[gi].push_back(row.label ? 1 : 0);
        routed_all.push_back(row.p_routed);
        labels_all.push_back(row.label ? 1 : 0);
        if (result.has_global) {
            global_scores[gi].push_back(row.p_global);
            global_all.push_back(row.p_global);
        }
    }
    for (int gi = 0; gi < 3; ++gi) {
        result.routed[gi] = eval_slice(routed_scores[gi], labels[gi]);
        if (result.has_global) result.global[gi] = eval_slice(global_scores[gi], labels[gi]);
    }
    const GroupEval overall = eval_slice(routed_all, labels_all);
    result.overall_defined = overall.auc_defined;
    result.routed_overall = overall.auc;
    if (result.has_global && result.overall_defined)
        result.global_overall = auc(global_all, labels_all);
    return result;
}

// ------------------------------------------------------- serialization ----

namespace {

ordered_json tree_to_json(const Tree& tree) {
    ordered_json nodes = ordered_json::array();
    for (const auto& n : tree.nodes)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return nodes;
}

Tree tree_from_json(const ordered_json& nodes) {
    Tree tree;
    for (const auto& n : nodes) {
        if (!n.is_array() || n.size() != 5) throw ParseError("router file: malformed tree node");
        Tree::Node node;
        node.feature = n[0].get<int>();
        node.threshold = n[1].get<double>();
        node.left = n[2].get<int>();
        node.right = n[3].get<int>();
        node.value = n[4].get<double>();
        tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw ParseError("router file: empty tree");
    return tree;
}

ordered_json model_to_json(const FittedModel& model) {
    ordered_json j;
    j["family"] = family_of(model);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantModel>) {
                j["value"] = m.value;
            } else if constexpr (std::is_same_v<T, GbmModel>) {
                j["initial_score"] = m.initial_score;
                j["shrinkage"] = m.shrinkage;
                ordered_json trees = ordered_json::array();
                for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
                j["trees"] = std::move(trees);
                j["train_deviance"] = m.train_deviance;
            } else if constexpr (std::is_same_v<T, RfModel>) {
                j["mtry"] = m.mtry;
                ordered_json trees = ordered_json::array();
                for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
                j["trees"] = std::move(trees);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                j["k"] = m.k;
                j["scaler"] = {{"mean", m.scaler.mean},
                               {"sd", m.scaler.sd},
                               {"constant", m.scaler.constant}};
                j["cols"] = m.train.cols();
                j["train"] = m.train.data();
                std::vector<int> labels(m.labels.begin(), m.labels.end());
                j["labels"] = labels;
            } else if constexpr (std::is_same_v<T, NbModel>) {
                j["kernel"] = m.kernel;
                j["priors"] = {m.priors[0], m.priors[1]};
                ordered_json classes = ordered_json::array();
                for (int cls = 0; cls < 2; ++cls) {
                    ordered_json feats = ordered_json::array();
                    for (const auto& f : m.per_class[cls]) {
                        ordered_json fj;
                        fj["mean"] = f.mean;
                        fj["sd"] = f.sd;
                        if (m.kernel) {
                            fj["bandwidth"] = f.bandwidth;
                            fj["samples"] = f.samples;
                        }
                        feats.push_back(std::move(fj));
                    }
                    classes.push_back(std::move(feats));
                }
                j["classes"] = std::move(classes);
            } else {  // LogitModel
                j["names"] = m.coefficient_names;
                j["coefficients"] = m.coefficients;
                j["covariance"] = m.covariance;
                j["log_likelihood"] = m.log_likelihood;
                j["null_log_likelihood"] = m.null_log_likelihood;
                j["n"] = m.n;
                j["converged"] = m.converged;
                j["separation"] = m.separation;
                j["iterations"] = m.iterations;
            }
        },
        model);
    return j;
}

FittedModel model_from_json(const ordered_json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "constant") {
        ConstantModel m;
        m.value = j.at("value").get<double>();
        return m;
    }
    if (family == "gbm") {
        GbmModel m;
        m.initial_score = j.at("initial_score").get<double>();
        m.shrinkage = j.at("shrinkage").get<double>();
        for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
        m.train_deviance = j.at("train_deviance").get<std::vector<double>>();
        return m;
    }
    if (family == "rf") {
        RfModel m;
        m.mtry = j.at("mtry").get<int>();
        for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
        if (m.trees.empty()) throw ParseError("router file: forest without trees");
        return m;
    }
    if (family == "knn") {
        KnnModel m;
        m.k = j.at("k").get<int>();
        m.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
        m.scaler.sd = j.at("scaler").at("sd").get<std::vector<double>>();
        m.scaler.constant = j.at("scaler").at("constant").get<std::vector<bool>>();
        const auto cols = j.at("cols").get<std::size_t>();
        const auto flat = j.at("train").get<std::vector<double>>();
        if (cols == 0 || flat.size() % cols != 0)
            throw ParseError("router file: kNN matrix shape mismatch");
        Matrix train(flat.size() / cols, cols);
        std::copy(flat.begin(), flat.end(), train.row(0));
        m.train = std::move(train);
        const auto labels = j.at("labels").get<std::vector<int>>();
        m.labels.assign(labels.begin(), labels.end());
        if (m.labels.size() != m.train.rows())
            throw ParseError("router file: kNN labels do not match rows");
        return m;
    }
    if (family == "nb") {
        NbModel m;
        m.kernel = j.at("kernel").get<bool>();
        m.priors[0] = j.at("priors").at(0).get<double>();
        m.priors[1] = j.at("priors").at(1).get<double>();
        const auto& classes = j.at("classes");
        if (!classes.is_array() || classes.size() != 2)
            throw ParseError("router file: naive Bayes needs two classes");
        for (int cls = 0; cls < 2; ++cls) {
            for (const auto& fj : classes.at(std::size_t(cls))) {
                NbModel::Feature f;
                f.mean = fj.at("mean").get<double>();
                f.sd = fj.at("sd").get<double>();
                if (m.kernel) {
                    f.bandwidth = fj.at("bandwidth").get<double>();
                    f.samples = fj.at("samples").get<std::vector<double>>();
                }
                m.per_class[cls].push_back(std::move(f));
            }
        }
        return m;
    }
    if (family == "logit") {
        LogitModel m;
        m.coefficient_names = j.at("names").get<std::vector<std::string>>();
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        m.covariance = j.at("covariance").get<std::vector<double>>();
        m.log_likelihood = j.at("log_likelihood").get<double>();
        m.null_log_likelihood = j.at("null_log_likelihood").get<double>();
        m.n = j.at("n").get<std::size_t>();
        m.converged = j.at("converged").get<bool>();
        m.separation = j.at("separation").get<bool>();
        m.iterations = j.at("iterations").get<int>();
        return m;
    }
    throw ParseError("router file: unknown model family '" + family + "'");
}

ordered_json params_to_json(const ParamMap& params) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, value] : params) j[key] = value;
    return j;
}

ParamMap params_from_json(const ordered_json& j) {
    ParamMap params;
    for (const auto& [key, value] : j.items()) params[key] = value.get<double>();
    return params;
}

ordered_json entry_to_json(const GroupModelEntry& entry, const std::string& schema_tag) {
    ordered_json j;
    j["schema"] = schema_tag;
    j["family"] = entry.spec.family;
    j["params"] = params_to_json(entry.spec.params);
    j["cv_mean_auc"] = entry.selection.mean_auc;
    j["cv_sd_auc"] = entry.selection.sd_auc;
    j["fold_aucs"] = entry.selection.fold_aucs;
    j["train_rows"] = entry.train_rows;
    j["train_positives"] = entry.train_positives;
    j["model"] = model_to_json(entry.model);
    return j;
}

GroupModelEntry entry_from_json(const ordered_json& j) {
    GroupModelEntry entry;
    const std::string tag = j.at("schema").get<std::string>();
    entry.schema = tag == "core" ? FeatureSchema::core() : FeatureSchema::for_group(group_from_id(tag));
    entry.spec.family = j.at("family").get<std::string>();
    entry.spec.params = params_from_json(j.at("params"));
    entry.selection.family = entry.spec.family;
    entry.selection.params = entry.spec.params;
    entry.selection.mean_auc = j.at("cv_mean_auc").get<double>();
    entry.selection.sd_auc = j.at("cv_sd_auc").get<double>();
    entry.selection.fold_aucs = j.at("fold_aucs").get<std::vector<double>>();
    entry.train_rows = j.at("train_rows").get<std::size_t>();
    entry.train_positives = j.at("train_positives").get<std::size_t>();
    entry.model = model_from_json(j.at("model"));
    if (family_of(entry.model) != entry.spec.family)
        throw ParseError("router file: entry family does not match its model");
    return entry;
}

}  // namespace

void save_router(const RouterModel& router, const std::string& path) {
    ordered_json j;
    j["magic"] = kMagic;
    j["version"] = RouterModel::kVersion;
    j["seed"] = router.seed;
    j["crawl_date"] = format_date(router.crawl_date);
    j["cv_k"] = router.cv_k;
    j["cv_repeats"] = router.cv_repeats;
    j["data_fingerprint"] = to_hex(router.data_fingerprint);
    j["grid_fingerprint"] = to_hex(router.grid_fingerprint);
    j["lexicon_fingerprint"] = to_hex(router.lexicon_fingerprint);
    j["wordlist_fingerprint"] = to_hex(router.wordlist_fingerprint);
    ordered_json groups = ordered_json::object();
    for (Group g : kAllGroups)
        groups[std::string(group_id(g))] = entry_to_json(router.groups[int(g)],
                                                         std::string(group_id(g)));
    j["groups"] = std::move(groups);
    if (router.global) j["global"] = entry_to_json(*router.global, "core");
    else j["global"] = nullptr;
    write_text_file(path, j.dump(1) + "\n");
}

RouterModel load_router(const std::string& path, const NameLexicon& lexicon,
                        const WordList& words) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("router file '" + path + "': " + e.what());
    }
    try {
        if (!j.is_object() || j.value("magic", std::string()) != kMagic)
            throw ParseError("not a router model file (bad magic)");
        const int version = j.at("version").get<int>();
        if (version != RouterModel::kVersion)
            throw ParseError("unsupported router file version " + std::to_string(version) +
                             " (expected " + std::to_string(RouterModel::kVersion) + ")");

        RouterModel router;
        router.seed = j.at("seed").get<std::uint64_t>();
        router.crawl_date = parse_date(j.at("crawl_date").get<std::string>());
        router.cv_k = j.at("cv_k").get<int>();
        router.cv_repeats = j.at("cv_repeats").get<int>();
        router.data_fingerprint = std::stoull(j.at("data_fingerprint").get<std::string>(), nullptr, 16);
        router.grid_fingerprint = std::stoull(j.at("grid_fingerprint").get<std::string>(), nullptr, 16);
        router.lexicon_fingerprint =
            std::stoull(j.at("lexicon_fingerprint").get<std::string>(), nullptr, 16);
        router.wordlist_fingerprint =
            std::stoull(j.at("wordlist_fingerprint").get<std::string>(), nullptr, 16);
        if (router.lexicon_fingerprint != lexicon.fingerprint())
            throw ValidationError("router was trained with a different lexicon");
        if (router.wordlist_fingerprint != words.fingerprint())
            throw ValidationError("router was trained with a different wordlist");

        for (Group g : kAllGroups) {
            const auto& entry = j.at("groups").at(std::string(group_id(g)));
            router.groups[int(g)] = entry_from_json(entry);
            if (router.groups[int(g)].schema.group != g ||
                router.groups[int(g)].schema.feature_names !=
                    FeatureSchema::for_group(g).feature_names)
                throw ParseError("router file: schema mismatch for group '" +
                                 std::string(group_id(g)) + "'");
        }
        if (!j.at("global").is_null()) router.global = entry_from_json(j.at("global"));
        return router;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("router file '" + path + "': " + e.what());
    }
}

}  // namespace fp
