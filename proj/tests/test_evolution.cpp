#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "tsgp/error.hpp"
#include "tsgp/evolution.hpp"
#include "tsgp/render.hpp"

using namespace tsgp;

namespace {

FitnessVector fv(std::vector<double> v) { return FitnessVector::from(std::move(v)); }

std::vector<FitnessVector> random_population(std::mt19937_64& gen, std::size_t n, std::size_t k, int levels)
{
    std::uniform_int_distribution<int> u(0, levels);
    std::vector<FitnessVector> pop;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(k);
        for (auto& x : v) {
            x = u(gen) / static_cast<double>(levels);
        }
        pop.push_back(fv(v));
    }
    return pop;
}

/// Two classes of noisy sinusoids with 2 and 5 cycles per window.
Dataset two_sines(std::uint64_t seed, std::size_t n, std::size_t L)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> noise(0.0, 0.3);
    Dataset d;
    d.name = "two_sines";
    d.class_labels = {0, 1};
    d.original_labels = {0, 1};
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % 2);
        const double cycles = c == 0 ? 2.0 : 5.0;
        const double p = phase(gen);
        std::vector<double> x(L);
        for (std::size_t t = 0; t < L; ++t) {
            x[t] = std::sin(2.0 * std::numbers::pi * cycles * static_cast<double>(t) / static_cast<double>(L) + p) + noise(gen);
        }
        d.series.push_back({x, c});
    }
    return d;
}

ProgramTree minimal(std::size_t L)
{
    return {make_concat({make_extractor(Op::StatisDist, make_input(), 0.5), make_extractor(Op::StatisDist, make_input(), 0.5)}), L};
}

EvoConfig small_config(std::uint64_t seed)
{
    EvoConfig cfg;
    cfg.population_size = 12;
    cfg.generations = 3;
    cfg.final_trees = 10;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST(Fitness, VectorMean)
{
    const auto f = fv({0.5, 1.0, 0.75, 0.25, 1.0});
    EXPECT_NEAR(f.mean, 0.7, 1e-12);
    EXPECT_EQ(FitnessVector::zeros(5).per_fold.size(), 5u);
}

TEST(Dominance, Examples)
{
    EXPECT_TRUE(dominates(fv({0.8, 0.8}), fv({0.7, 0.8})));
    EXPECT_FALSE(dominates(fv({0.9, 0.5}), fv({0.5, 0.9})));
    EXPECT_FALSE(dominates(fv({0.5, 0.9}), fv({0.9, 0.5})));
    EXPECT_FALSE(dominates(fv({0.6, 0.6}), fv({0.6, 0.6})));
}

TEST(Dominance, StrictPartialOrder)
{
    std::mt19937_64 gen(1);
    for (int rep = 0; rep < 3000; ++rep) {
        const auto p = random_population(gen, 3, 5, 3);
        const auto &a = p[0], &b = p[1], &c = p[2];
        EXPECT_FALSE(dominates(a, a));
        EXPECT_FALSE(dominates(a, b) && dominates(b, a));
        if (dominates(a, b) && dominates(b, c)) {
            EXPECT_TRUE(dominates(a, c));
        }
        EXPECT_EQ(dominates(a, b), oracle::dominates(a.per_fold, b.per_fold));
    }
}

TEST(Selection, TournamentSizeAndCounts)
{
    EXPECT_EQ(tournament_size(7.0, 100), 7u);
    EXPECT_EQ(tournament_size(7.0, 20), 2u);
    EXPECT_EQ(tournament_size(7.0, 50), 4u);
    EXPECT_EQ(tournament_size(100.0, 9), 9u);
    EXPECT_EQ(tournament_size(0.1, 9), 1u);
    EvoConfig cfg;
    auto c = offspring_counts(cfg);
    EXPECT_EQ(c.elites, 1u);
    EXPECT_EQ(c.crossover, 80u);
    EXPECT_EQ(c.mutation, 19u);
    cfg.population_size = 20;
    c = offspring_counts(cfg);
    EXPECT_EQ(c.elites + c.crossover + c.mutation, 20u);
    EXPECT_EQ(c.elites, 1u);
    EXPECT_EQ(c.mutation, 3u);
}

TEST(Selection, NonDominatedSubsetExamples)
{
    const std::vector<FitnessVector> pop{fv({0.9, 0.2}), fv({0.2, 0.9}), fv({0.1, 0.1})};
    Rng rng(1);
    std::vector<TournamentRecord> log;
    const auto parents = pareto_tournament_select(pop, 100.0, 2, rng, &log);
    ASSERT_EQ(log.size(), 1u);
    std::set<std::size_t> sel(log[0].selected.begin(), log[0].selected.end());
    EXPECT_EQ(sel, (std::set<std::size_t>{0, 1}));
    EXPECT_EQ(parents.size(), 2u);

    const std::vector<FitnessVector> pop2{fv({1, 1}), fv({0.9, 0.2})};
    log.clear();
    pareto_tournament_select(pop2, 100.0, 1, rng, &log);
    EXPECT_EQ(log[0].selected, (std::vector<std::size_t>{0}));
}

TEST(Selection, SoundAgainstBruteForce)
{
    std::mt19937_64 gen(2);
    Rng rng(2);
    std::size_t events = 0;
    while (events < 1000) {
        const auto pop = random_population(gen, 30, 5, 4);
        std::vector<std::vector<double>> raw;
        for (const auto& f : pop) {
            raw.push_back(f.per_fold);
        }
        std::vector<TournamentRecord> log;
        const auto parents = pareto_tournament_select(pop, 20.0, 25, rng, &log);
        EXPECT_EQ(parents.size(), 25u);
        std::vector<std::size_t> pool;
        for (const auto& rec : log) {
            EXPECT_EQ(rec.sample.size(), 6u);
            EXPECT_EQ(std::set<std::size_t>(rec.sample.begin(), rec.sample.end()).size(), rec.sample.size());
            EXPECT_EQ(rec.selected, oracle::nondominated(raw, rec.sample));
            pool.insert(pool.end(), rec.selected.begin(), rec.selected.end());
            ++events;
        }
        EXPECT_TRUE(std::equal(parents.begin(), parents.end(), pool.begin()));
    }
}

TEST(Selection, ScalarPicksBestMean)
{
    std::mt19937_64 gen(3);
    Rng rng(3);
    const auto pop = random_population(gen, 40, 5, 10);
    std::vector<TournamentRecord> log;
    const auto parents = scalar_tournament_select(pop, 10.0, 30, rng, &log);
    ASSERT_EQ(parents.size(), 30u);
    for (std::size_t i = 0; i < log.size(); ++i) {
        ASSERT_EQ(log[i].selected.size(), 1u);
        for (auto s : log[i].sample) {
            EXPECT_GE(pop[log[i].selected[0]].mean, pop[s].mean);
        }
    }
}

TEST(Fitness, SeparableDatasetScoresPerfectly)
{
    Dataset d;
    d.class_labels = {0, 1};
    d.original_labels = {0, 1};
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const int c = i % 2;
        std::vector<double> x(12);
        for (auto& v : x) {
            v = u(gen) + (c == 1 ? 10.0 : 0.0);
        }
        d.series.push_back({x, c});
    }
    const auto plan = stratified_kfold(d, 5, 1);
    const auto f = fitness(minimal(12), d, plan, 10, 5);
    EXPECT_EQ(f.per_fold, std::vector<double>(5, 1.0));
    EXPECT_EQ(f, fitness(minimal(12), d, plan, 10, 5));
}

TEST(Variation, CrossoverAndMutationStayValid)
{
    Rng rng(5);
    for (std::size_t L : {16u, 150u}) {
        std::vector<ProgramTree> pool;
        for (int i = 0; i < 50; ++i) {
            pool.push_back(generate_tree(rng, i % 2 ? GrowMethod::Full : GrowMethod::Grow, 2 + i % 5, L));
        }
        std::size_t changed = 0;
        for (int i = 0; i < 1500; ++i) {
            const auto& a = pool[rng.uniform_index(pool.size())];
            const auto& b = pool[rng.uniform_index(pool.size())];
            const auto child = crossover(a, b, rng);
            ASSERT_TRUE(is_valid(child)) << format_report(validate_tree(child));
            EXPECT_LE(child.depth(), 6u);
            const auto mutant = mutate(a, rng);
            ASSERT_TRUE(is_valid(mutant)) << format_report(validate_tree(mutant));
            changed += (child != a) + (mutant != a);
        }
        EXPECT_GT(changed, 2000u);
    }
}

TEST(Variation, IdenticalParents)
{
    Rng rng(6);
    const auto a = generate_tree(rng, GrowMethod::Full, 5, 64);
    for (int i = 0; i < 200; ++i) {
        EXPECT_TRUE(is_valid(crossover(a, a, rng)));
    }
}

TEST(Variation, TauMutationStaysInRange)
{
    Rng rng(7);
    const auto t = minimal(16);
    for (int i = 0; i < 200; ++i) {
        const auto m = mutate(t, rng);
        for (const auto& [path, d] : preorder_paths(m.root)) {
            const Node& n = node_at(m.root, path);
            if (n.op == Op::TermTau || n.op == Op::TermLambda) {
                EXPECT_TRUE(ops::is_fraction(n.value));
            }
        }
    }
}

TEST(Config, Validation)
{
    EXPECT_NO_THROW(validate_config(EvoConfig{}));
    auto bad = EvoConfig{};
    bad.generations = 0;
    EXPECT_THROW(validate_config(bad), Error);
    bad = EvoConfig{};
    bad.mutation_rate = 0.3;
    EXPECT_THROW(validate_config(bad), Error);
    bad = EvoConfig{};
    bad.tournament_percent = 0.0;
    EXPECT_THROW(validate_config(bad), Error);
    bad = EvoConfig{};
    bad.depth_max = 7;
    EXPECT_THROW(validate_config(bad), Error);
    const auto j = to_json(EvoConfig{});
    EXPECT_EQ(to_json(config_from_json(j)), j);
}

namespace {

struct Audit : EvolveObserver {
    std::vector<std::size_t> sizes;
    std::size_t rounds = 0;
    std::size_t invalid = 0;
    std::size_t unsound = 0;

    void on_generation(std::size_t, std::span<const ProgramTree> pop, std::span<const FitnessVector> fit) override
    {
        sizes.push_back(pop.size());
        for (const auto& t : pop) {
            invalid += is_valid(t, 2, 6) ? 0 : 1;
        }
        last.assign(fit.begin(), fit.end());
    }
    void on_selection(std::span<const TournamentRecord> recs) override
    {
        ++rounds;
        for (const auto& r : recs) {
            for (auto a : r.selected) {
                for (auto b : r.sample) {
                    unsound += dominates(last[b], last[a]) ? 1 : 0;
                }
            }
        }
    }
    std::vector<FitnessVector> last;
};

} // namespace

TEST(Evolve, DeterministicMonotoneAndClosed)
{
    const Dataset d = two_sines(1, 40, 48);
    Audit audit;
    const auto a = evolve(d, small_config(9), nullptr, &audit);
    const auto b = evolve(d, small_config(9));
    EXPECT_EQ(serialize_model(a), serialize_model(b));
    ASSERT_EQ(a.history.size(), 4u);
    for (std::size_t g = 1; g < a.history.size(); ++g) {
        EXPECT_GE(a.history[g].best_mean_fitness, a.history[g - 1].best_mean_fitness);
    }
    EXPECT_EQ(audit.rounds, 3u);
    EXPECT_EQ(audit.sizes, std::vector<std::size_t>(4, 12));
    EXPECT_EQ(audit.invalid, 0u);
    EXPECT_EQ(audit.unsound, 0u);
    EXPECT_EQ(a.classifier.trees.size(), 10u);
    EXPECT_EQ(a.classifier.n_features, output_dimension(a.tree));
    double best = 0.0;
    for (const auto& r : a.history) {
        best = std::max(best, r.best_mean_fitness);
    }
    EXPECT_EQ(a.fitness.mean, best);

    const auto c = evolve(d, small_config(10));
    EXPECT_NE(serialize_model(a), serialize_model(c));
}

TEST(Evolve, ModelDocumentRoundTrip)
{
    const Dataset d = two_sines(2, 30, 32);
    const auto m = evolve(d, small_config(3));
    const auto back = deserialize_model(serialize_model(m));
    EXPECT_EQ(serialize_model(back), serialize_model(m));
    EXPECT_EQ(predict_model(back, d), predict_model(m, d));
    EXPECT_THROW(deserialize_model("{\"format_version\":1"), Error);
}

TEST(Evolve, TwoSineTaskIsLearned)
{
    const Dataset train = two_sines(11, 60, 64);
    const Dataset test = two_sines(12, 60, 64);
    EvoConfig cfg;
    cfg.population_size = 20;
    cfg.generations = 10;
    cfg.seed = 4;
    const auto m = evolve(train, cfg);
    EXPECT_GE(accuracy(predict_model(m, test), test.labels()), 0.9) << render_tree(m.tree);
}
