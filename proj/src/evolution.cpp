#include "tsgp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "tsgp/error.hpp"
#include "tsgp/parallel.hpp"

namespace tsgp {

FitnessVector FitnessVector::from(std::vector<double> per_fold)
{
    FitnessVector f;
    f.mean = per_fold.empty() ? 0.0 : std::accumulate(per_fold.begin(), per_fold.end(), 0.0) / static_cast<double>(per_fold.size());
    f.per_fold = std::move(per_fold);
    return f;
}

FitnessVector FitnessVector::zeros(std::size_t k) { return from(std::vector<double>(k, 0.0)); }

bool dominates(const FitnessVector& a, const FitnessVector& b)
{
    if (a.per_fold.size() != b.per_fold.size()) {
        throw Error(ErrorKind::LengthMismatch, "fitness vectors of different lengths");
    }
    bool strictly = false;
    for (std::size_t j = 0; j < a.per_fold.size(); ++j) {
        if (a.per_fold[j] < b.per_fold[j]) {
            return false;
        }
        strictly = strictly || a.per_fold[j] > b.per_fold[j];
    }
    return strictly;
}

std::string_view selection_name(Selection s) noexcept { return s == Selection::Pareto ? "pareto" : "scalar"; }

void validate_config(const EvoConfig& cfg)
{
    auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); };
    if (cfg.population_size < 2) {
        bad("population size must be at least 2");
    }
    if (cfg.generations < 1) {
        bad("generations must be at least 1");
    }
    for (double r : {cfg.crossover_rate, cfg.mutation_rate, cfg.elitism_rate}) {
        if (!(r >= 0.0 && r <= 1.0)) {
            bad("variation rates must lie in [0, 1]");
        }
    }
    if (std::abs(cfg.crossover_rate + cfg.mutation_rate + cfg.elitism_rate - 1.0) > 1e-9) {
        bad("crossover, mutation and elitism rates must sum to 1");
    }
    if (cfg.depth_min < kMinTreeDepth || cfg.depth_max > kMaxTreeDepth || cfg.depth_min > cfg.depth_max) {
        bad("depth bounds must satisfy 2 <= min <= max <= 6");
    }
    if (cfg.folds < 2) {
        bad("at least 2 folds are needed");
    }
    if (cfg.fitness_trees < 1 || cfg.final_trees < 1) {
        bad("tree counts must be positive");
    }
    if (!(cfg.tournament_percent > 0.0 && cfg.tournament_percent <= 100.0)) {
        bad("tournament percentage must be in (0, 100]");
    }
    const auto counts = offspring_counts(cfg);
    if (counts.elites > cfg.population_size) {
        bad("elitism exceeds the population");
    }
}

nlohmann::json to_json(const EvoConfig& cfg)
{
    return {
        {"population_size", cfg.population_size},
        {"generations", cfg.generations},
        {"crossover_rate", cfg.crossover_rate},
        {"mutation_rate", cfg.mutation_rate},
        {"elitism_rate", cfg.elitism_rate},
        {"depth_min", cfg.depth_min},
        {"depth_max", cfg.depth_max},
        {"folds", cfg.folds},
        {"fitness_trees", cfg.fitness_trees},
        {"final_trees", cfg.final_trees},
        {"tournament_percent", cfg.tournament_percent},
        {"seed", cfg.seed},
        {"selection", selection_name(cfg.selection)},
    };
}

EvoConfig config_from_json(const nlohmann::json& j)
{
    EvoConfig c;
    c.population_size = j.at("population_size").get<std::size_t>();
    c.generations = j.at("generations").get<std::size_t>();
    c.crossover_rate = j.at("crossover_rate").get<double>();
    c.mutation_rate = j.at("mutation_rate").get<double>();
    c.elitism_rate = j.at("elitism_rate").get<double>();
    c.depth_min = j.at("depth_min").get<int>();
    c.depth_max = j.at("depth_max").get<int>();
    c.folds = j.at("folds").get<int>();
    c.fitness_trees = j.at("fitness_trees").get<std::size_t>();
    c.final_trees = j.at("final_trees").get<std::size_t>();
    c.tournament_percent = j.at("tournament_percent").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto sel = j.at("selection").get<std::string>();
    if (sel == "pareto") {
        c.selection = Selection::Pareto;
    } else if (sel == "scalar") {
        c.selection = Selection::Scalar;
    } else {
        throw Error(ErrorKind::MalformedModel, "unknown selection mode \"" + sel + "\"");
    }
    return c;
}

OffspringCounts offspring_counts(const EvoConfig& cfg)
{
    const auto m = static_cast<double>(cfg.population_size);
    // the epsilons absorb binary noise in rates like 0.19 * 100
    const auto elites = static_cast<std::size_t>(std::ceil(cfg.elitism_rate * m - 1e-9));
    const auto mutation = std::min(cfg.population_size - std::min(elites, cfg.population_size),
        static_cast<std::size_t>(std::floor(cfg.mutation_rate * m + 1e-9)));
    const std::size_t crossover = cfg.population_size - std::min(cfg.population_size, elites + mutation);
    return {elites, crossover, mutation};
}

std::size_t tournament_size(double percent, std::size_t population)
{
    const auto n = static_cast<std::size_t>(std::ceil(percent * static_cast<double>(population) / 100.0 - 1e-9));
    return std::clamp<std::size_t>(n, 1, population);
}

FitnessVector fitness(const ProgramTree& tree, const Dataset& d, const FoldPlan& plan, std::size_t fitness_trees,
    std::uint64_t seed)
{
    const FeatureMatrix all = transform_dataset(tree, d, Exec::Serial);
    const std::uint64_t tree_seed = derive_seed(seed, fnv1a64(canonical_tree_key(tree)));
    std::vector<double> acc;
    acc.reserve(plan.k());
    for (std::size_t j = 0; j < plan.k(); ++j) {
        const auto& fold = plan.folds[j];
        const FeatureMatrix train = all.select_rows(fold.train);
        const FeatureMatrix val = all.select_rows(fold.validation);
        const auto model = fit_extra_trees(train, train.labels, fitness_trees, derive_seed(tree_seed, j), d.n_classes(), Exec::Serial);
        acc.push_back(accuracy(predict(model, val, Exec::Serial), val.labels));
    }
    return FitnessVector::from(std::move(acc));
}

namespace {

std::vector<std::size_t> sample_distinct(std::size_t population, std::size_t n, Rng& rng)
{
    std::vector<std::size_t> all(population);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::swap(all[i], all[i + rng.uniform_index(population - i)]);
    }
    all.resize(n);
    return all;
}

} // namespace

std::vector<std::size_t> pareto_tournament_select(std::span<const FitnessVector> population, double percent,
    std::size_t n_parents, Rng& rng, std::vector<TournamentRecord>* log)
{
    if (population.empty()) {
        throw Error(ErrorKind::InvalidConfig, "selection from an empty population");
    }
    const std::size_t nt = tournament_size(percent, population.size());
    std::vector<std::size_t> pool;
    while (pool.size() < n_parents) {
        const auto sample = sample_distinct(population.size(), nt, rng);
        std::vector<std::size_t> front;
        for (std::size_t a : sample) {
            const bool beaten = std::any_of(sample.begin(), sample.end(),
                [&](std::size_t b) { return b != a && dominates(population[b], population[a]); });
            if (!beaten) {
                front.push_back(a);
            }
        }
        pool.insert(pool.end(), front.begin(), front.end());
        if (log) {
            log->push_back({sample, std::move(front)});
        }
    }
    pool.resize(n_parents);
    return pool;
}

std::vector<std::size_t> scalar_tournament_select(std::span<const FitnessVector> population, double percent,
    std::size_t n_parents, Rng& rng, std::vector<TournamentRecord>* log)
{
    if (population.empty()) {
        throw Error(ErrorKind::InvalidConfig, "selection from an empty population");
    }
    const std::size_t nt = tournament_size(percent, population.size());
    std::vector<std::size_t> pool;
    while (pool.size() < n_parents) {
        const auto sample = sample_distinct(population.size(), nt, rng);
        std::size_t winner = sample.front();
        for (std::size_t a : sample) {
            const double ma = population[a].mean;
            const double mw = population[winner].mean;
            if (ma > mw || (ma == mw && a < winner)) {
                winner = a;
            }
        }
        pool.push_back(winner);
        if (log) {
            log->push_back({sample, {winner}});
        }
    }
    return pool;
}

ProgramTree crossover(const ProgramTree& a, const ProgramTree& b, Rng& rng, int depth_max, int depth_min)
{
    const auto donors = preorder_paths(b.root);
    for (int attempt = 0; attempt < kVariationAttempts; ++attempt) {
        ProgramTree child = a;
        std::vector<NodePath> functions;
        std::vector<NodePath> terminals;
        for (const auto& [path, depth] : preorder_paths(child.root)) {
            if (path.empty()) {
                continue;
            }
            (is_terminal(node_at(child.root, path).op) ? terminals : functions).push_back(path);
        }
        const bool pick_function = terminals.empty() || (!functions.empty() && rng.bernoulli(0.9));
        const auto& pool = pick_function ? functions : terminals;
        if (pool.empty()) {
            break;
        }
        const NodePath& target = pool[rng.uniform_index(pool.size())];
        Node& slot = node_at(child.root, target);
        const TypeTag tag = output_type(slot.op);
        std::vector<const Node*> matches;
        for (const auto& [path, depth] : donors) {
            const Node& n = node_at(b.root, path);
            if (output_type(n.op) == tag) {
                matches.push_back(&n);
            }
        }
        if (matches.empty()) {
            continue;
        }
        slot = *matches[rng.uniform_index(matches.size())];
        if (is_valid(child, depth_min, depth_max)) {
            return child;
        }
    }
    return a;
}

ProgramTree mutate(const ProgramTree& t, Rng& rng, int depth_max, int depth_min)
{
    for (int attempt = 0; attempt < kVariationAttempts; ++attempt) {
        ProgramTree child = t;
        const auto paths = preorder_paths(child.root);
        try {
            if (rng.bernoulli(0.5)) {
                const auto& [path, depth] = paths[rng.uniform_index(paths.size())];
                Node& slot = node_at(child.root, path);
                if (is_value_terminal(slot.op)) {
                    resample_terminal(rng, child, path);
                } else {
                    const int budget = depth_max - static_cast<int>(depth);
                    slot = generate_subtree(rng, GrowMethod::Grow, output_type(slot.op), budget,
                        required_output_length(child, path), child.series_length);
                }
            } else {
                std::vector<NodePath> values;
                for (const auto& [path, depth] : paths) {
                    if (is_value_terminal(node_at(child.root, path).op)) {
                        values.push_back(path);
                    }
                }
                if (values.empty()) {
                    continue;
                }
                resample_terminal(rng, child, values[rng.uniform_index(values.size())]);
            }
        } catch (const Error&) {
            continue;
        }
        if (is_valid(child, depth_min, depth_max)) {
            return child;
        }
    }
    return t;
}

namespace {

struct Individual {
    ProgramTree tree;
    std::string key;
    std::size_t size = 0;
    std::size_t id = 0; ///< creation order across the run
    FitnessVector fit;
};

/// Higher mean first, then fewer nodes, then earlier creation.
bool better(const Individual& a, const Individual& b)
{
    if (a.fit.mean != b.fit.mean) {
        return a.fit.mean > b.fit.mean;
    }
    if (a.size != b.size) {
        return a.size < b.size;
    }
    return a.id < b.id;
}

} // namespace

EvolvedModel evolve(const Dataset& d, const EvoConfig& cfg, std::ostream* progress, EvolveObserver* observer)
{
    validate_config(cfg);
    validate_dataset(d);
    const FoldPlan plan = stratified_kfold(d, cfg.folds, derive_seed(cfg.seed, 1));
    Rng rng(derive_seed(cfg.seed, 2));
    const std::size_t L = d.length();
    const std::size_t m = cfg.population_size;
    const auto counts = offspring_counts(cfg);

    std::size_t next_id = 0;
    auto make = [&](ProgramTree tree) {
        Individual ind;
        ind.key = canonical_tree_key(tree);
        ind.size = tree.size();
        ind.id = next_id++;
        ind.tree = std::move(tree);
        return ind;
    };

    std::vector<Individual> pop;
    pop.reserve(m);
    const int n_depths = cfg.depth_max - cfg.depth_min + 1;
    for (std::size_t i = 0; i < m; ++i) {
        const GrowMethod method = i % 2 == 0 ? GrowMethod::Grow : GrowMethod::Full;
        const int depth = cfg.depth_min + static_cast<int>((i / 2) % static_cast<std::size_t>(n_depths));
        pop.push_back(make(generate_tree(rng, method, depth, L)));
    }

    std::unordered_map<std::string, FitnessVector> cache;
    std::size_t failures = 0;
    EvolvedModel result;
    Individual best_of_run;
    bool have_best = false;

    for (std::size_t gen = 0;; ++gen) {
        // evaluate each distinct uncached tree once, in population order
        std::vector<const Individual*> todo;
        std::size_t cached = 0;
        for (const auto& ind : pop) {
            if (cache.count(ind.key)) {
                ++cached;
            } else if (std::none_of(todo.begin(), todo.end(), [&](const Individual* p) { return p->key == ind.key; })) {
                todo.push_back(&ind);
            } else {
                ++cached;
            }
        }
        std::vector<FitnessVector> fresh(todo.size());
        std::vector<char> failed(todo.size(), 0);
        parallel_for(Exec::Parallel, todo.size(), [&](std::size_t i) {
            try {
                fresh[i] = fitness(todo[i]->tree, d, plan, cfg.fitness_trees, cfg.seed);
            } catch (const Error&) {
                fresh[i] = FitnessVector::zeros(plan.k());
                failed[i] = 1;
            }
        });
        for (std::size_t i = 0; i < todo.size(); ++i) {
            cache.emplace(todo[i]->key, fresh[i]);
            failures += failed[i] ? 1 : 0;
        }
        std::vector<FitnessVector> fits;
        fits.reserve(m);
        for (auto& ind : pop) {
            ind.fit = cache.at(ind.key);
            fits.push_back(ind.fit);
        }

        const auto champion = std::min_element(pop.begin(), pop.end(), better);
        if (!have_best || better(*champion, best_of_run)) {
            best_of_run = *champion;
            have_best = true;
        }
        GenerationRecord rec;
        rec.generation = gen;
        rec.best_mean_fitness = champion->fit.mean;
        rec.mean_mean_fitness =
            std::accumulate(pop.begin(), pop.end(), 0.0, [](double s, const Individual& x) { return s + x.fit.mean; })
            / static_cast<double>(m);
        rec.best_tree_size = champion->size;
        rec.evaluations_cached = cached;
        result.history.push_back(rec);
        if (observer) {
            std::vector<ProgramTree> trees;
            trees.reserve(m);
            for (const auto& ind : pop) {
                trees.push_back(ind.tree);
            }
            observer->on_generation(gen, trees, fits);
        }
        if (progress) {
            *progress << "generation " << gen << " best=" << std::setprecision(6) << rec.best_mean_fitness
                      << " mean=" << rec.mean_mean_fitness << " size=" << rec.best_tree_size << " cached=" << cached << '\n';
        }
        if (gen == cfg.generations) {
            break;
        }

        const std::size_t n_parents = 2 * counts.crossover + counts.mutation;
        std::vector<TournamentRecord> log;
        auto* log_ptr = observer ? &log : nullptr;
        const auto parents = cfg.selection == Selection::Pareto
            ? pareto_tournament_select(fits, cfg.tournament_percent, n_parents, rng, log_ptr)
            : scalar_tournament_select(fits, cfg.tournament_percent, n_parents, rng, log_ptr);
        if (observer) {
            observer->on_selection(log);
        }

        std::vector<std::size_t> ranked(m);
        std::iota(ranked.begin(), ranked.end(), 0);
        std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return better(pop[a], pop[b]); });

        std::vector<Individual> next;
        next.reserve(m);
        for (std::size_t e = 0; e < counts.elites; ++e) {
            next.push_back(pop[ranked[e]]);
        }
        for (std::size_t c = 0; c < counts.crossover; ++c) {
            const auto& a = pop[parents[2 * c]].tree;
            const auto& b = pop[parents[2 * c + 1]].tree;
            next.push_back(make(crossover(a, b, rng, cfg.depth_max, cfg.depth_min)));
        }
        for (std::size_t k = 0; k < counts.mutation; ++k) {
            next.push_back(make(mutate(pop[parents[2 * counts.crossover + k]].tree, rng, cfg.depth_max, cfg.depth_min)));
        }
        pop = std::move(next);
    }

    if (progress && failures > 0) {
        *progress << failures << " individual(s) failed evaluation and were given zero fitness\n";
    }

    const FeatureMatrix features = transform_dataset(best_of_run.tree, d);
    result.tree = best_of_run.tree;
    result.fitness = best_of_run.fit;
    result.classifier = fit_extra_trees(features, features.labels, cfg.final_trees, derive_seed(cfg.seed, 3), d.n_classes());
    result.config = cfg;
    result.meta.seed = cfg.seed;
    result.meta.dataset = d.name;
    result.meta.created = "tsgp " + std::string(tool_version());
    result.original_labels = d.original_labels;
    return result;
}

std::vector<int> predict_model(const EvolvedModel& m, const Dataset& d)
{
    return predict(m.classifier, transform_dataset(m.tree, d));
}

nlohmann::json model_document(const EvolvedModel& m)
{
    nlohmann::json doc = tree_document(m.tree, m.meta);
    doc["labels"] = m.original_labels;
    doc["znorm"] = m.znorm;
    doc["fitness"] = {{"per_fold", m.fitness.per_fold}, {"mean", m.fitness.mean}};
    doc["config"] = to_json(m.config);
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& r : m.history) {
        hist.push_back({
            {"generation", r.generation},
            {"best_mean_fitness", r.best_mean_fitness},
            {"mean_mean_fitness", r.mean_mean_fitness},
            {"best_tree_size", r.best_tree_size},
            {"evaluations_cached", r.evaluations_cached},
        });
    }
    doc["history"] = std::move(hist);
    doc["classifier"] = to_json(m.classifier);
    return doc;
}

std::string serialize_model(const EvolvedModel& m) { return model_document(m).dump(1) + "\n"; }

EvolvedModel deserialize_model(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedModel, e.what());
    }
    EvolvedModel m;
    m.tree = tree_from_document(doc);
    try {
        const auto& meta = doc.at("meta");
        m.meta.seed = meta.at("seed").get<std::uint64_t>();
        m.meta.dataset = meta.at("dataset").get<std::string>();
        m.meta.created = meta.at("created").get<std::string>();
        m.original_labels = doc.at("labels").get<std::vector<double>>();
        m.znorm = doc.value("znorm", false);
        m.fitness = FitnessVector::from(doc.at("fitness").at("per_fold").get<std::vector<double>>());
        m.config = config_from_json(doc.at("config"));
        for (const auto& r : doc.at("history")) {
            m.history.push_back({r.at("generation").get<std::size_t>(), r.at("best_mean_fitness").get<double>(),
                r.at("mean_mean_fitness").get<double>(), r.at("best_tree_size").get<std::size_t>(),
                r.at("evaluations_cached").get<std::size_t>()});
        }
        m.classifier = extra_trees_from_json(doc.at("classifier"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedModel, e.what());
    }
    if (m.classifier.n_features != output_dimension(m.tree)) {
        throw Error(ErrorKind::MalformedModel, "classifier width does not match the tree's feature dimension");
    }
    if (m.original_labels.size() != m.classifier.n_classes) {
        throw Error(ErrorKind::MalformedModel, "label table does not match the classifier's class count");
    }
    return m;
}

void write_log_csv(std::ostream& os, std::span<const GenerationRecord> history)
{
    os << "generation,best_mean_fitness,mean_mean_fitness,best_tree_size,evaluations_cached\n";
    os << std::setprecision(12);
    for (const auto& r : history) {
        os << r.generation << ',' << r.best_mean_fitness << ',' << r.mean_mean_fitness << ',' << r.best_tree_size << ','
           << r.evaluations_cached << '\n';
    }
}

} // namespace tsgp
