#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsgp/classifier.hpp"
#include "tsgp/dataset.hpp"
#include "tsgp/program.hpp"
#include "tsgp/rng.hpp"
#include "tsgp/serialize.hpp"

namespace tsgp {

/// Per-fold validation accuracies, each one a separate objective.
struct FitnessVector {
    std::vector<double> per_fold;
    double mean = 0.0;

    static FitnessVector from(std::vector<double> per_fold);
    static FitnessVector zeros(std::size_t k);

    friend bool operator==(const FitnessVector&, const FitnessVector&) = default;
};

/// a is no worse on every fold and strictly better on at least one.
bool dominates(const FitnessVector& a, const FitnessVector& b);

enum class Selection { Pareto, Scalar };

std::string_view selection_name(Selection s) noexcept;

struct EvoConfig {
    std::size_t population_size = 100;
    std::size_t generations = 50;
    double crossover_rate = 0.8;
    double mutation_rate = 0.19;
    double elitism_rate = 0.01;
    int depth_min = 2;
    int depth_max = 6;
    int folds = 5;
    std::size_t fitness_trees = 10;
    std::size_t final_trees = 100;
    double tournament_percent = 7.0; ///< mu: share of the population sampled per tournament
    std::uint64_t seed = 1;
    Selection selection = Selection::Pareto;
};

/// Throws InvalidConfig describing the first problem found.
void validate_config(const EvoConfig& cfg);

nlohmann::json to_json(const EvoConfig& cfg);
EvoConfig config_from_json(const nlohmann::json& j);

struct OffspringCounts {
    std::size_t elites;
    std::size_t crossover;
    std::size_t mutation;
};

/// Elites round up, mutation rounds down, crossover takes the remainder.
OffspringCounts offspring_counts(const EvoConfig& cfg);

/// n_t = ceil(mu * |P| / 100), at least 1 and at most |P|.
std::size_t tournament_size(double percent, std::size_t population);

/// k-fold fitness of one tree. Each fold's extra-trees seed depends on the
/// run seed, the fold index and a hash of the tree, so the same tree always
/// scores the same within a run.
FitnessVector fitness(const ProgramTree& tree, const Dataset& d, const FoldPlan& plan, std::size_t fitness_trees,
    std::uint64_t seed);

struct TournamentRecord {
    std::vector<std::size_t> sample;
    std::vector<std::size_t> selected;
};

/// Repeatedly samples n_t distinct individuals and appends the whole
/// non-dominated part of each sample to the pool; returns the first
/// `n_parents` pool entries.
std::vector<std::size_t> pareto_tournament_select(std::span<const FitnessVector> population, double percent,
    std::size_t n_parents, Rng& rng, std::vector<TournamentRecord>* log = nullptr);

/// Conventional tournament on mean fitness (one winner per sample, lowest
/// index among equal means).
std::vector<std::size_t> scalar_tournament_select(std::span<const FitnessVector> population, double percent,
    std::size_t n_parents, Rng& rng, std::vector<TournamentRecord>* log = nullptr);

inline constexpr int kVariationAttempts = 10;

/// Swaps a random subtree of a copy of `a` for a same-typed one from `b`
/// (function nodes with probability 0.9). Falls back to a copy of `a`.
ProgramTree crossover(const ProgramTree& a, const ProgramTree& b, Rng& rng, int depth_max = kMaxTreeDepth,
    int depth_min = kMinTreeDepth);

/// Subtree replacement or terminal re-sampling, chosen with equal odds.
/// Falls back to a copy of `t`.
ProgramTree mutate(const ProgramTree& t, Rng& rng, int depth_max = kMaxTreeDepth, int depth_min = kMinTreeDepth);

struct GenerationRecord {
    std::size_t generation = 0;
    double best_mean_fitness = 0.0;
    double mean_mean_fitness = 0.0;
    std::size_t best_tree_size = 0;
    std::size_t evaluations_cached = 0;
};

struct EvolvedModel {
    ProgramTree tree;
    ExtraTreesModel classifier;
    FitnessVector fitness;
    std::vector<GenerationRecord> history;
    EvoConfig config;
    ModelMeta meta;
    std::vector<double> original_labels;
    bool znorm = false; ///< series were z-normalized before training
};

/// Optional observer hooks; used by tests to audit the run.
struct EvolveObserver {
    virtual ~EvolveObserver() = default;
    virtual void on_generation(std::size_t /*generation*/, std::span<const ProgramTree> /*population*/,
        std::span<const FitnessVector> /*fitness*/)
    {
    }
    virtual void on_selection(std::span<const TournamentRecord> /*tournaments*/) { }
};

/// Runs the full evolutionary search and refits the best-of-run individual.
EvolvedModel evolve(const Dataset& d, const EvoConfig& cfg, std::ostream* progress = nullptr,
    EvolveObserver* observer = nullptr);

/// Class-index predictions for a dataset of the model's series length.
std::vector<int> predict_model(const EvolvedModel& m, const Dataset& d);

nlohmann::json model_document(const EvolvedModel& m);
std::string serialize_model(const EvolvedModel& m);
/// Throws MalformedModel.
EvolvedModel deserialize_model(std::string_view text);

/// `generation,best_mean_fitness,mean_mean_fitness,best_tree_size,evaluations_cached`
void write_log_csv(std::ostream& os, std::span<const GenerationRecord> history);

} // namespace tsgp
