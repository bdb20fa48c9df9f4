#include "cli.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tsgp/classifier.hpp"
#include "tsgp/cost.hpp"
#include "tsgp/dataset.hpp"
#include "tsgp/error.hpp"
#include "tsgp/evolution.hpp"
#include "tsgp/parallel.hpp"
#include "tsgp/render.hpp"
#include "tsgp/serialize.hpp"
#include "tsgp/stats.hpp"

namespace tsgp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string train;
    std::string test;
    std::string data;
    std::string out;
    std::string model;
    std::string models;
    std::string method = "1nn";
    std::string selection = "pareto";
    std::uint64_t seed = 1;
    std::size_t generations = 50;
    std::size_t population = 100;
    double mu = 7.0;
    std::size_t fitness_trees = 10;
    std::size_t final_trees = 100;
    int folds = 5;
    int threads = 0;
    std::size_t length = 0;
    bool znorm = false;
    bool no_labels = false;
    bool include_classifier = false;
    bool quiet = false;
};

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::FileNotFound, p.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text)
{
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream os(p, std::ios::binary);
    if (!os) {
        throw Error(ErrorKind::FileNotFound, "cannot write " + p.string());
    }
    os << text;
}

fs::path sibling(const fs::path& out, const std::string& suffix)
{
    return out.parent_path() / (out.stem().string() + suffix);
}

std::string format_label(double v)
{
    std::ostringstream os;
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        os << static_cast<long long>(v);
    } else {
        os << std::setprecision(17) << v;
    }
    return os.str();
}

Dataset load(const std::string& path, const Options& o, bool labeled = true)
{
    LoadOptions lo;
    lo.has_labels = labeled && !o.no_labels;
    lo.min_classes = lo.has_labels ? 1 : 0;
    Dataset d = load_ucr_tsv(path, lo);
    return o.znorm ? z_normalize(std::move(d)) : d;
}

/// Loads data to run through a trained model: labels are expressed in the
/// model's class indexing and the model's preprocessing is applied.
Dataset load_for_model(const std::string& path, const Options& o, const EvolvedModel& m)
{
    Options copy = o;
    copy.znorm = o.znorm || m.znorm;
    Dataset d = load(path, copy);
    if (d.labeled()) {
        d = relabel_with(d, m.original_labels);
    }
    if (d.length() != m.tree.series_length) {
        throw Error(ErrorKind::LengthMismatch, "series length " + std::to_string(d.length()) + " does not match the model's "
                + std::to_string(m.tree.series_length));
    }
    return d;
}

EvolvedModel load_model(const std::string& path) { return deserialize_model(read_file(path)); }

void write_manifest(const fs::path& out, const std::string& command, const std::vector<std::string>& argv,
    const json& config, const json& inputs, std::uint64_t seed, double seconds)
{
    json m = {
        {"command", command},
        {"argv", argv},
        {"config", config},
        {"inputs", inputs},
        {"seed", seed},
        {"version", tool_version()},
        {"wall_clock_seconds", seconds},
    };
    write_file(sibling(out, "_manifest.json"), m.dump(2) + "\n");
}

void write_features_csv(std::ostream& os, const FeatureMatrix& m, const Dataset& d)
{
    os << "label";
    for (std::size_t j = 0; j < m.cols; ++j) {
        os << ",f" << j;
    }
    os << '\n' << std::setprecision(12);
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (d.labeled()) {
            os << format_label(d.original_labels[static_cast<std::size_t>(d.series[i].label)]);
        }
        for (double v : m.row(i)) {
            os << ',' << v;
        }
        os << '\n';
    }
}

std::vector<fs::path> expand_glob(const std::string& pattern)
{
    const fs::path p(pattern);
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    const std::string leaf = p.filename().string();
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        return out;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && fnmatch(leaf.c_str(), entry.path().filename().c_str(), 0) == 0) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

int cmd_evolve(const Options& o, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    EvoConfig cfg;
    cfg.population_size = o.population;
    cfg.generations = o.generations;
    cfg.tournament_percent = o.mu;
    cfg.fitness_trees = o.fitness_trees;
    cfg.final_trees = o.final_trees;
    cfg.folds = o.folds;
    cfg.seed = o.seed;
    cfg.selection = o.selection == "scalar" ? Selection::Scalar : Selection::Pareto;
    validate_config(cfg);

    Dataset d = load(o.train, o);
    d.name = fs::path(o.train).stem().string();
    validate_dataset(d);
    EvolvedModel m = evolve(d, cfg, o.quiet ? nullptr : &err);
    m.znorm = o.znorm;

    const fs::path model_path(o.out);
    write_file(model_path, serialize_model(m));
    std::ostringstream log;
    write_log_csv(log, m.history);
    write_file(sibling(model_path, "_log.csv"), log.str());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json config = to_json(cfg);
    config["znorm"] = o.znorm;
    write_manifest(model_path, "evolve", argv, config, {{"train", o.train}}, o.seed, secs);
    out << render_tree(m.tree) << '\n';
    out << "fitness=" << std::setprecision(6) << m.fitness.mean << '\n';
    return kOk;
}

int cmd_transform(const Options& o, std::ostream& out)
{
    const EvolvedModel m = load_model(o.model);
    const Dataset d = load_for_model(o.data, o, m);
    const FeatureMatrix f = transform_dataset(m.tree, d);
    if (o.out.empty()) {
        write_features_csv(out, f, d);
    } else {
        std::ostringstream os;
        write_features_csv(os, f, d);
        write_file(o.out, os.str());
    }
    return kOk;
}

int cmd_predict(const Options& o, std::ostream& out)
{
    const EvolvedModel m = load_model(o.model);
    const Dataset d = load_for_model(o.data, o, m);
    const auto pred = predict_model(m, d);
    std::ostringstream labels;
    for (int p : pred) {
        labels << format_label(m.original_labels[static_cast<std::size_t>(p)]) << '\n';
    }
    if (o.out.empty()) {
        out << labels.str();
    } else {
        write_file(o.out, labels.str());
    }
    if (d.labeled()) {
        out << "accuracy=" << std::setprecision(6) << accuracy(pred, d.labels()) << '\n';
    }
    return kOk;
}

ProgramTree tree_only(const std::string& path)
{
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedModel, e.what());
    }
    return tree_from_document(doc);
}

int cmd_inspect(const Options& o, std::ostream& out)
{
    const ProgramTree t = tree_only(o.model);
    out << render_tree(t) << '\n';
    out << "series_length=" << t.series_length << " depth=" << t.depth() << " nodes=" << t.size() << '\n';
    const auto branches = branch_summaries(t);
    for (std::size_t i = 0; i < branches.size(); ++i) {
        out << "branch " << i << ": " << branches[i].describe() << '\n';
    }
    out << "feature_dimension=" << output_dimension(t) << '\n';
    return kOk;
}

int cmd_cost(const Options& o, std::ostream& out)
{
    const ProgramTree t = tree_only(o.model);
    const std::size_t L = o.length > 0 ? o.length : t.series_length;
    CostReport r;
    if (o.include_classifier) {
        const EvolvedModel m = load_model(o.model);
        r = cost_report(t, L, &m.classifier);
    } else {
        r = cost_report(t, L);
    }
    out << to_json(r).dump(2) << '\n';
    out << cost_summary_line(r) << '\n';
    return kOk;
}

int cmd_stats(const Options& o, std::ostream& out)
{
    const auto files = expand_glob(o.models);
    if (files.empty()) {
        throw Error(ErrorKind::FileNotFound, "no model matches " + o.models);
    }
    std::vector<ProgramTree> trees;
    for (const auto& f : files) {
        trees.push_back(tree_only(f.string()));
    }
    const StatsTable table = structural_stats(trees);
    std::ostringstream os;
    write_stats_csv(os, table);
    if (o.out.empty()) {
        out << os.str();
    } else {
        write_file(o.out, os.str());
    }
    return kOk;
}

int cmd_baseline(const Options& o, std::ostream& out)
{
    const Dataset train = load(o.train, o);
    validate_dataset(train);
    Dataset test = relabel_with(load(o.test, o), train.original_labels);
    if (test.length() != train.length()) {
        throw Error(ErrorKind::LengthMismatch, "train and test series lengths differ");
    }
    std::vector<int> pred;
    if (o.method == "1nn") {
        pred = predict_1nn(train, test);
    } else {
        const FeatureMatrix x = to_matrix(train);
        const auto m = fit_extra_trees(x, x.labels, o.final_trees, o.seed, train.n_classes());
        pred = predict(m, to_matrix(test));
    }
    out << "method=" << o.method << '\n';
    out << "accuracy=" << std::setprecision(6) << accuracy(pred, test.labels()) << '\n';
    return kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Evolves typed feature-learning programs for time-series classification."};
    app.name(args.empty() ? "tsgp" : fs::path(args.front()).filename().string());
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));
    Options o;

    auto threads = [&](CLI::App* c) { c->add_option("--threads", o.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber); };
    auto znorm = [&](CLI::App* c) { c->add_flag("--znorm", o.znorm, "z-normalize every series"); };

    auto* evolve_cmd = app.add_subcommand("evolve", "evolve a model on a training set");
    evolve_cmd->add_option("--train", o.train, "training TSV")->required();
    evolve_cmd->add_option("--out", o.out, "model JSON to write")->required();
    evolve_cmd->add_option("--seed", o.seed);
    evolve_cmd->add_option("--generations", o.generations);
    evolve_cmd->add_option("--population", o.population);
    evolve_cmd->add_option("--mu", o.mu, "tournament sample, percent of the population");
    evolve_cmd->add_option("--fitness-trees", o.fitness_trees);
    evolve_cmd->add_option("--final-trees", o.final_trees);
    evolve_cmd->add_option("--folds", o.folds);
    evolve_cmd->add_option("--selection", o.selection)->check(CLI::IsMember({"pareto", "scalar"}));
    evolve_cmd->add_flag("--quiet", o.quiet, "no per-generation progress");
    znorm(evolve_cmd);
    threads(evolve_cmd);

    auto* transform_cmd = app.add_subcommand("transform", "write learned features as CSV");
    transform_cmd->add_option("--model", o.model)->required();
    transform_cmd->add_option("--data,--test", o.data)->required();
    transform_cmd->add_option("--out", o.out, "CSV path (stdout if omitted)");
    transform_cmd->add_flag("--no-labels", o.no_labels);
    znorm(transform_cmd);
    threads(transform_cmd);

    auto* predict_cmd = app.add_subcommand("predict", "classify series with a model");
    predict_cmd->add_option("--model", o.model)->required();
    predict_cmd->add_option("--data,--test", o.data)->required();
    predict_cmd->add_option("--out", o.out, "write predicted labels here instead of stdout");
    predict_cmd->add_flag("--no-labels", o.no_labels);
    znorm(predict_cmd);
    threads(predict_cmd);

    auto* inspect_cmd = app.add_subcommand("inspect", "print a model's program and branches");
    inspect_cmd->add_option("--model", o.model)->required();

    auto* cost_cmd = app.add_subcommand("cost", "FLOPs and peak memory of one inference");
    cost_cmd->add_option("--model", o.model)->required();
    cost_cmd->add_option("--length", o.length, "series length (default: the model's)");
    cost_cmd->add_flag("--include-classifier", o.include_classifier);

    auto* stats_cmd = app.add_subcommand("stats", "operation-usage proportions over models");
    stats_cmd->add_option("--models", o.models, "file glob, e.g. runs/*.json")->required();
    stats_cmd->add_option("--out", o.out, "CSV path (stdout if omitted)");

    auto* baseline_cmd = app.add_subcommand("baseline", "accuracy of a raw-series baseline");
    baseline_cmd->add_option("--train", o.train)->required();
    baseline_cmd->add_option("--test", o.test)->required();
    baseline_cmd->add_option("--method", o.method)->check(CLI::IsMember({"1nn", "et-raw"}));
    baseline_cmd->add_option("--seed", o.seed);
    baseline_cmd->add_option("--final-trees", o.final_trees);
    znorm(baseline_cmd);
    threads(baseline_cmd);

    try {
        std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (app.get_subcommands().empty()) {
            err << app.help();
        }
        return kConfigError;
    }

    set_thread_count(o.threads);
    try {
        if (*evolve_cmd) {
            return cmd_evolve(o, args, out, err);
        }
        if (*transform_cmd) {
            return cmd_transform(o, out);
        }
        if (*predict_cmd) {
            return cmd_predict(o, out);
        }
        if (*inspect_cmd) {
            return cmd_inspect(o, out);
        }
        if (*cost_cmd) {
            return cmd_cost(o, out);
        }
        if (*stats_cmd) {
            return cmd_stats(o, out);
        }
        if (*baseline_cmd) {
            return cmd_baseline(o, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (is_data_error(e.kind())) {
            return kDataError;
        }
        return e.kind() == ErrorKind::InvalidConfig ? kConfigError : kInternal;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace tsgp::cli
