// fp — command-line surface of the follower-prediction toolkit.
//
// Every subcommand reads its file paths and parameters from a run config
// (simple [section] key=value text), writes deterministic artifacts into the
// output directory, and records a manifest with input/output fingerprints so
// the run can be reproduced from the manifest alone.
//
// The tool speaks to the library exclusively through the C API.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "followerpred.h"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// plumbing

struct ApiError : std::runtime_error {
    int status;
    explicit ApiError(int status_, const std::string& msg)
        : std::runtime_error(msg), status(status_) {}
};

void check(int status) {
    if (status != FP_OK) throw ApiError(status, fp_last_error());
}

// Owns a string returned by the library.
struct ApiString {
    char* ptr = nullptr;
    ApiString() = default;
    ApiString(const ApiString&) = delete;
    ApiString& operator=(const ApiString&) = delete;
    ~ApiString() { fp_string_free(ptr); }
    char** out() { return &ptr; }
    std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(ptr); }
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};

using Lexicon = Handle<fp_lexicon, fp_lexicon_free>;
using Wordlist = Handle<fp_wordlist, fp_wordlist_free>;
using SnapshotHandle = Handle<fp_snapshot, fp_snapshot_free>;
using LabeledHandle = Handle<fp_labeled, fp_labeled_free>;
using RouterHandle = Handle<fp_router, fp_router_free>;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// ---------------------------------------------------------------------------
// run config: [section] blocks of key = value lines, '#' comments. Relative
// paths resolve against the config file's directory.

struct RunConfig {
    fs::path base;                                // directory of the config file
    std::string path;                             // as given on the command line
    std::map<std::string, std::string> values;    // "section.key" -> value

    bool has(const std::string& key) const { return values.count(key) != 0; }

    std::string get(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end())
            throw std::runtime_error("config '" + path + "' is missing key '" + key + "'");
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    fs::path resolve(const std::string& value) const {
        fs::path p(value);
        return p.is_absolute() ? p : base / p;
    }

    fs::path path_for(const std::string& key) const { return resolve(get("paths." + key)); }
};

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    RunConfig cfg;
    cfg.path = path;
    cfg.base = fs::path(path).parent_path();
    if (cfg.base.empty()) cfg.base = ".";

    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": empty section name");
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": key outside any [section]");
        std::string full = section + "." + key;
        if (!cfg.values.emplace(full, value).second)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate key '" +
                                     full + "'");
    }
    return cfg;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("invalid " + what + ": '" + text + "'");
    }
}

long parse_long(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("invalid " + what + ": '" + text + "'");
    }
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("invalid " + what + ": '" + text + "'");
    }
}

// ---------------------------------------------------------------------------
// per-run context shared by the subcommands

struct Run {
    RunConfig cfg;
    fs::path out_dir;
    std::uint64_t seed = 0;
    int threads = 1;

    ordered_json inputs = ordered_json::object();
    ordered_json outputs = ordered_json::object();
    ordered_json parameters = ordered_json::object();

    std::string fingerprint(const fs::path& p) const {
        ApiString hex;
        check(fp_file_fingerprint(p.string().c_str(), hex.out()));
        return hex.str();
    }

    fs::path input(const std::string& key) {
        fs::path p = cfg.path_for(key);
        inputs[p.string()] = fingerprint(p);
        return p;
    }

    void note_output(const fs::path& p) { outputs[p.string()] = fingerprint(p); }

    fs::path out_file(const std::string& name) { return out_dir / name; }

    void write_output(const fs::path& p, const std::string& content) {
        fs::path dir = p.parent_path();
        if (!dir.empty()) fs::create_directories(dir);
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        out << content;
        out.close();
        if (!out) throw std::runtime_error("failed writing '" + p.string() + "'");
        note_output(p);
    }

    void write_manifest(const std::string& command) {
        ordered_json m;
        m["command"] = command;
        m["library_version"] = fp_version();
        m["config"] = {{"path", cfg.path}, {"fingerprint", fingerprint(cfg.path)}};
        m["parameters"] = parameters;
        m["inputs"] = inputs;
        m["outputs"] = outputs;
        fs::path p = out_file("manifest_" + command + ".json");
        fs::create_directories(out_dir);
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        out << m.dump(1) << "\n";
    }

    // shared loaders ---------------------------------------------------------
    void load_lexicon(Lexicon& lex, Wordlist& words) {
        fs::path lp = input("lexicon");
        fs::path wp = input("wordlist");
        check(fp_lexicon_load(lp.string().c_str(), lex.out()));
        check(fp_wordlist_load(wp.string().c_str(), words.out()));
    }

    void load_labeled_input(const std::string& key, LabeledHandle& labeled) {
        fs::path p = input(key);
        check(fp_labeled_load(p.string().c_str(), labeled.out()));
    }

    int cv_k() const { return int(parse_long(cfg.get_or("run.cv_k", "10"), "run.cv_k")); }
    int cv_repeats() const {
        return int(parse_long(cfg.get_or("run.cv_repeats", "5"), "run.cv_repeats"));
    }
};

void diag(const std::string& key, std::uint64_t value) {
    std::cerr << key << "=" << value << "\n";
}

// ---------------------------------------------------------------------------
// subcommands

void cmd_synth(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    fs::path config = run.input("synth_config");
    fs::path first = run.cfg.path_for("raw_first");
    fs::path second = run.cfg.path_for("raw_second");
    fs::path truth = run.cfg.path_for("truth");
    for (const fs::path& p : {first, second, truth})
        if (!p.parent_path().empty()) fs::create_directories(p.parent_path());

    std::uint64_t n_first = 0, n_second = 0, n_truth = 0;
    check(fp_synth_generate(config.string().c_str(), lex.get(), words.get(), run.threads,
                            first.string().c_str(), second.string().c_str(),
                            truth.string().c_str(), &n_first, &n_second, &n_truth));
    run.note_output(first);
    run.note_output(second);
    run.note_output(truth);
    run.parameters["threads"] = run.threads;
    diag("generated_first", n_first);
    diag("generated_second", n_second);
    diag("truth_records", n_truth);
    run.write_manifest("synth");
}

void cmd_ingest(Run& run) {
    auto ingest_one = [&](const std::string& in_key, const std::string& out_key,
                          const std::string& date_key, const std::string& tag) {
        fs::path in_path = run.input(in_key);
        const char* date = nullptr;
        std::string date_value;
        if (run.cfg.has("run." + date_key)) {
            date_value = run.cfg.get("run." + date_key);
            date = date_value.c_str();
            run.parameters[date_key] = date_value;
        }
        SnapshotHandle raw, filtered;
        check(fp_snapshot_load(in_path.string().c_str(), date, raw.out()));
        std::uint64_t n = 0, malformed = 0;
        check(fp_snapshot_counts(raw.get(), &n, &malformed));
        check(fp_snapshot_filter(raw.get(), filtered.out()));
        std::uint64_t kept = 0;
        check(fp_snapshot_counts(filtered.get(), &kept, nullptr));
        fs::path out_path = run.cfg.path_for(out_key);
        if (!out_path.parent_path().empty()) fs::create_directories(out_path.parent_path());
        check(fp_snapshot_save(filtered.get(), out_path.string().c_str()));
        run.note_output(out_path);
        diag("parsed_" + tag, n);
        diag("malformed_" + tag, malformed);
        diag("kept_" + tag, kept);
    };
    ingest_one("raw_first", "first", "crawl_date_first", "first");
    ingest_one("raw_second", "second", "crawl_date_second", "second");
    run.write_manifest("ingest");
}

void cmd_label(Run& run) {
    fs::path first_path = run.input("first");
    fs::path second_path = run.input("second");
    SnapshotHandle first, second;
    check(fp_snapshot_load(first_path.string().c_str(), nullptr, first.out()));
    check(fp_snapshot_load(second_path.string().c_str(), nullptr, second.out()));
    LabeledHandle labeled;
    std::uint64_t attrition = 0;
    check(fp_labeled_join(first.get(), second.get(), labeled.out(), &attrition));
    std::uint64_t n = 0, positives = 0;
    check(fp_labeled_counts(labeled.get(), &n, &positives));
    fs::path out_path = run.cfg.path_for("labeled");
    if (!out_path.parent_path().empty()) fs::create_directories(out_path.parent_path());
    check(fp_labeled_save(labeled.get(), out_path.string().c_str()));
    run.note_output(out_path);
    diag("attrition", attrition);
    diag("labeled", n);
    diag("positives", positives);
    run.write_manifest("label");
}

void cmd_split(Run& run) {
    LabeledHandle labeled;
    run.load_labeled_input("labeled", labeled);
    double ratio = parse_double(run.cfg.get_or("run.split_ratio", "0.5"), "run.split_ratio");
    LabeledHandle train, eval;
    check(fp_labeled_split(labeled.get(), ratio, run.seed, train.out(), eval.out()));
    fs::path train_path = run.cfg.path_for("train");
    fs::path eval_path = run.cfg.path_for("eval");
    for (const fs::path& p : {train_path, eval_path})
        if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
    check(fp_labeled_save(train.get(), train_path.string().c_str()));
    check(fp_labeled_save(eval.get(), eval_path.string().c_str()));
    run.note_output(train_path);
    run.note_output(eval_path);
    std::uint64_t n_train = 0, pos_train = 0, n_eval = 0, pos_eval = 0;
    check(fp_labeled_counts(train.get(), &n_train, &pos_train));
    check(fp_labeled_counts(eval.get(), &n_eval, &pos_eval));
    run.parameters["split_ratio"] = ratio;
    run.parameters["seed"] = run.seed;
    diag("train", n_train);
    diag("train_positives", pos_train);
    diag("eval", n_eval);
    diag("eval_positives", pos_eval);
    run.write_manifest("split");
}

void cmd_groups(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    LabeledHandle labeled;
    run.load_labeled_input("labeled", labeled);

    ApiString assignments, text, csv;
    check(fp_report_group_assignments(labeled.get(), lex.get(), words.get(), assignments.out()));
    check(fp_report_group_counts(labeled.get(), lex.get(), words.get(), 0, text.out()));
    check(fp_report_group_counts(labeled.get(), lex.get(), words.get(), 1, csv.out()));
    run.write_output(run.out_file("assignments.csv"), assignments.str());
    run.write_output(run.out_file("groups.txt"), text.str());
    run.write_output(run.out_file("groups.csv"), csv.str());
    std::cout << text.str();
    run.write_manifest("groups");
}

void cmd_describe(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    LabeledHandle labeled;
    run.load_labeled_input("labeled", labeled);
    int bins = int(parse_long(run.cfg.get_or("run.histogram_bins", "30"), "run.histogram_bins"));
    run.parameters["histogram_bins"] = bins;

    ApiString changes_text, changes_csv, measures_text, measures_csv, hist_first, hist_second;
    check(fp_report_changes(labeled.get(), 0, changes_text.out()));
    check(fp_report_changes(labeled.get(), 1, changes_csv.out()));
    check(fp_report_measures(labeled.get(), lex.get(), words.get(), 0, measures_text.out()));
    check(fp_report_measures(labeled.get(), lex.get(), words.get(), 1, measures_csv.out()));
    check(fp_histogram_followers(labeled.get(), 0, bins, hist_first.out()));
    check(fp_histogram_followers(labeled.get(), 1, bins, hist_second.out()));

    run.write_output(run.out_file("changes.txt"), changes_text.str());
    run.write_output(run.out_file("changes.csv"), changes_csv.str());
    run.write_output(run.out_file("measures.txt"), measures_text.str());
    run.write_output(run.out_file("measures.csv"), measures_csv.str());
    run.write_output(run.out_file("hist_followers_first.csv"), hist_first.str());
    run.write_output(run.out_file("hist_followers_second.csv"), hist_second.str());
    std::cout << changes_text.str() << "\n" << measures_text.str();
    run.write_manifest("describe");
}

void cmd_anova(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    LabeledHandle labeled;
    run.load_labeled_input("labeled", labeled);

    ApiString anova_text, anova_csv, tukey_text, tukey_csv;
    check(fp_report_anova(labeled.get(), lex.get(), words.get(), 0, anova_text.out()));
    check(fp_report_anova(labeled.get(), lex.get(), words.get(), 1, anova_csv.out()));
    check(fp_report_tukey(labeled.get(), lex.get(), words.get(), 0, tukey_text.out()));
    check(fp_report_tukey(labeled.get(), lex.get(), words.get(), 1, tukey_csv.out()));

    run.write_output(run.out_file("anova.txt"), anova_text.str());
    run.write_output(run.out_file("anova.csv"), anova_csv.str());
    run.write_output(run.out_file("tukey.txt"), tukey_text.str());
    run.write_output(run.out_file("tukey.csv"), tukey_csv.str());
    std::cout << anova_text.str() << "\n" << tukey_text.str();
    run.write_manifest("anova");
}

void cmd_logreg(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    LabeledHandle labeled;
    run.load_labeled_input("logreg_input", labeled);

    const char* group = nullptr;
    std::string group_value;
    if (run.cfg.has("run.group")) {
        group_value = run.cfg.get("run.group");
        group = group_value.c_str();
        run.parameters["group"] = group_value;
    }
    ApiString text, csv;
    check(fp_report_logreg(labeled.get(), lex.get(), words.get(), group, 0, text.out()));
    check(fp_report_logreg(labeled.get(), lex.get(), words.get(), group, 1, csv.out()));
    run.write_output(run.out_file("logreg.txt"), text.str());
    run.write_output(run.out_file("logreg.csv"), csv.str());
    std::cout << text.str();
    run.write_manifest("logreg");
}

void cmd_gridsearch(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    LabeledHandle labeled;
    run.load_labeled_input("gridsearch_input", labeled);
    fs::path grid = run.input("grid");
    std::string scope = run.cfg.get_or("run.scope", "global");
    run.parameters["scope"] = scope;
    run.parameters["cv_k"] = run.cv_k();
    run.parameters["cv_repeats"] = run.cv_repeats();
    run.parameters["seed"] = run.seed;
    run.parameters["threads"] = run.threads;

    ApiString text, csv, failures;
    check(fp_gridsearch(labeled.get(), lex.get(), words.get(), grid.string().c_str(),
                        scope.c_str(), run.cv_k(), run.cv_repeats(), run.seed, run.threads,
                        text.out(), csv.out(), failures.out()));
    run.write_output(run.out_file("gridsearch.txt"), text.str());
    run.write_output(run.out_file("gridsearch.csv"), csv.str());
    run.write_output(run.out_file("gridsearch_failures.csv"), failures.str());
    std::cout << text.str();
    run.write_manifest("gridsearch");
}

void cmd_train(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    LabeledHandle train;
    run.load_labeled_input("train", train);
    fs::path grid = run.input("grid");
    int with_global = int(parse_long(run.cfg.get_or("run.with_global", "1"), "run.with_global"));
    run.parameters["cv_k"] = run.cv_k();
    run.parameters["cv_repeats"] = run.cv_repeats();
    run.parameters["seed"] = run.seed;
    run.parameters["threads"] = run.threads;
    run.parameters["with_global"] = with_global;

    RouterHandle router;
    check(fp_router_train(train.get(), lex.get(), words.get(), grid.string().c_str(), run.cv_k(),
                          run.cv_repeats(), run.seed, run.threads, with_global, router.out()));
    fs::path router_path = run.cfg.path_for("router");
    if (!router_path.parent_path().empty()) fs::create_directories(router_path.parent_path());
    check(fp_router_save(router.get(), router_path.string().c_str()));
    run.note_output(router_path);

    ApiString text, csv;
    check(fp_router_summary(router.get(), 0, text.out()));
    check(fp_router_summary(router.get(), 1, csv.out()));
    run.write_output(run.out_file("train_summary.txt"), text.str());
    run.write_output(run.out_file("train_summary.csv"), csv.str());
    std::cout << text.str();
    run.write_manifest("train");
}

void cmd_evaluate(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    fs::path router_path = run.input("router");
    RouterHandle router;
    check(fp_router_load(router_path.string().c_str(), lex.get(), words.get(), router.out()));
    LabeledHandle eval;
    run.load_labeled_input("eval", eval);

    ApiString text, csv;
    check(fp_router_evaluate(router.get(), eval.get(), lex.get(), words.get(), 0, text.out()));
    check(fp_router_evaluate(router.get(), eval.get(), lex.get(), words.get(), 1, csv.out()));
    run.write_output(run.out_file("evaluate.txt"), text.str());
    run.write_output(run.out_file("evaluate.csv"), csv.str());
    std::cout << text.str();
    run.write_manifest("evaluate");
}

void cmd_predict(Run& run) {
    Lexicon lex;
    Wordlist words;
    run.load_lexicon(lex, words);
    fs::path router_path = run.input("router");
    RouterHandle router;
    check(fp_router_load(router_path.string().c_str(), lex.get(), words.get(), router.out()));
    fs::path in_path = run.input("predict_input");
    SnapshotHandle snapshot;
    check(fp_snapshot_load(in_path.string().c_str(), nullptr, snapshot.out()));

    ApiString csv;
    check(fp_router_predict(router.get(), snapshot.get(), lex.get(), words.get(), csv.out()));
    run.write_output(run.out_file("predictions.csv"), csv.str());
    std::uint64_t n = 0;
    check(fp_snapshot_counts(snapshot.get(), &n, nullptr));
    diag("predicted", n);
    run.write_manifest("predict");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"follower-increase prediction toolkit"};
    app.set_version_flag("--version", fp_version());
    app.require_subcommand(1);

    struct Shared {
        std::string config_path = "run.ini";
        std::string out_dir;
        std::int64_t seed = -1;
        int threads = 0;
    } shared;

    using Command = void (*)(Run&);
    std::vector<std::pair<CLI::App*, Command>> commands;
    auto add = [&](const char* name, const char* desc, Command fn) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", shared.config_path, "run config file")->required();
        sub->add_option("--out", shared.out_dir, "output directory (overrides [paths] out)");
        sub->add_option("--seed", shared.seed, "seed (overrides [run] seed)");
        sub->add_option("--threads", shared.threads, "worker threads (overrides [run] threads)");
        commands.emplace_back(sub, fn);
    };

    add("synth", "generate synthetic snapshots with planted truth", cmd_synth);
    add("ingest", "parse and filter the two raw snapshots", cmd_ingest);
    add("label", "join the crawls and derive the increased flag", cmd_label);
    add("split", "stratified train/eval split", cmd_split);
    add("groups", "assign name-field groups and describe follower counts", cmd_groups);
    add("describe", "descriptive statistics and histograms", cmd_describe);
    add("anova", "one-way ANOVA with Tukey-Kramer post-hoc", cmd_anova);
    add("logreg", "per-group logistic regression of the increased flag", cmd_logreg);
    add("gridsearch", "cross-validated model grid search", cmd_gridsearch);
    add("train", "train the per-group router (grid search + refit)", cmd_train);
    add("evaluate", "held-out evaluation against global and random baselines", cmd_evaluate);
    add("predict", "score a snapshot with a trained router", cmd_predict);

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [sub, fn] : commands) {
            if (!sub->parsed()) continue;
            Run run;
            run.cfg = load_run_config(shared.config_path);
            run.out_dir = shared.out_dir.empty() ? run.cfg.resolve(run.cfg.get_or("paths.out", "out"))
                                                 : fs::path(shared.out_dir);
            run.seed = shared.seed >= 0 ? std::uint64_t(shared.seed)
                                        : parse_u64(run.cfg.get_or("run.seed", "0"), "run.seed");
            run.threads = shared.threads > 0
                              ? shared.threads
                              : int(parse_long(run.cfg.get_or("run.threads", "1"), "run.threads"));
            if (run.threads < 1) throw std::runtime_error("threads must be >= 1");
            fs::create_directories(run.out_dir);
            fn(run);
        }
    } catch (const ApiError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.status == FP_OK ? 1 : e.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
