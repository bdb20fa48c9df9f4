// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../tools/cli.hpp"
#include "oracles.hpp"
#include "tsgp/classifier.hpp"
#include "tsgp/cost.hpp"
#include "tsgp/dataset.hpp"
#include "tsgp/error.hpp"
#include "tsgp/evolution.hpp"
#include "tsgp/ops.hpp"
#include "tsgp/program.hpp"
#include "tsgp/render.hpp"

using namespace tsgp;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TSGP_DATA;

struct Outcome {
    bool ok = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body, double limit_seconds = 0.0)
{
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit_seconds > 0.0 && secs > limit_seconds) {
        o.ok = false;
        o.detail += " (over the " + std::to_string(static_cast<int>(limit_seconds)) + " s limit)";
    }
    failures += o.ok ? 0 : 1;
    std::printf("%s criterion %d %s: %s [%.2f s]\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v, int prec = 4)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n)
{
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = g(gen);
    }
    return v;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args, std::string* out = nullptr)
{
    args.insert(args.begin(), "tsgp");
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out) {
        *out = o.str();
    }
    if (code != 0) {
        std::cerr << e.str();
    }
    return code;
}

bool monotone(const std::vector<GenerationRecord>& h)
{
    for (std::size_t g = 1; g < h.size(); ++g) {
        if (h[g].best_mean_fitness < h[g - 1].best_mean_fitness) {
            return false;
        }
    }
    return true;
}

// -- criterion 1 ---------------------------------------------------------------

Outcome dft_oracle()
{
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<std::size_t> len(2, 64);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto x = random_vector(gen, len(gen));
        const std::size_t n = x.size();
        const auto got = ops::dom_freq(x);
        const auto want = oracle::dft_magnitude(x);
        double energy = 0.0;
        for (double v : x) {
            energy += v * v;
        }
        const double scale = std::sqrt(energy * static_cast<double>(n));
        double spec = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            worst = std::max(worst, std::abs(got[u] - want[u]) / std::max(want[u], scale));
            worst = std::max(worst, std::abs(got[u] - got[(n - u) % n]) / scale);
            spec += got[u] * got[u];
        }
        worst = std::max(worst, std::abs(spec - static_cast<double>(n) * energy) / (static_cast<double>(n) * energy));
    }
    return {worst <= 1e-9, "500 inputs, worst relative error " + fmt(worst, 3)};
}

// -- criterion 2 ---------------------------------------------------------------

Outcome hand_checks()
{
    std::vector<std::string> bad;
    auto expect = [&](bool c, const char* what) {
        if (!c) {
            bad.emplace_back(what);
        }
    };
    expect(ops::seg_detect(std::vector<double>{5, 6, 7, 8}, 2, 3) == ops::Series{7, 8}, "seg_detect [5,6,7,8],2,3");
    expect(ops::seg_detect(std::vector<double>{1, 2, 3}, 2, 1) == ops::Series{1, 2}, "seg_detect [1,2,3],2,1");
    std::vector<double> ramp(140);
    for (std::size_t i = 0; i < ramp.size(); ++i) {
        ramp[i] = static_cast<double>(i + 1);
    }
    const auto seg = ops::seg_detect(ramp, 21, 103);
    expect(seg.front() == 103 && seg.back() == 123 && seg.size() == 21, "seg_detect positions 103..123");
    const auto g = ops::patch_geometry(100, 4);
    expect(g.patch_length == 25 && g.stride == 12 && g.count == 7, "patch geometry 100/4");
    expect(ops::ada_patch(std::vector<double>(100, 0.0), 4).count() == 7, "ada_patch 100/4 count");
    const auto p8 = ops::ada_patch(std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7}, 2);
    expect(p8.count() == 3 && p8.patches[1].front() == 2 && p8.patches[2].front() == 4, "ada_patch 8/2 starts");
    const auto pr = ops::pool(std::vector<double>{1, -1, 2, 0});
    expect(pr.ppv == 0.5 && pr.max == 2 && pr.mean == 0.5, "pool [1,-1,2,0]");
    expect(ops::pool(std::vector<double>{0, 0}).ppv == 0.0, "pool zeros not positive");
    expect(ops::statis_dist_indices(8, 0.5) == std::vector<std::size_t>{1, 3, 6, 8}, "StatisDist indices l=8 tau=0.5");
    expect(ops::extract_statis_dist(std::vector<double>{80, 10, 60, 20, 40, 30, 70, 50}, 0.5) == ops::Series{10, 30, 60, 80},
        "StatisDist values");
    expect(ops::dom_freq(std::vector<double>{1, 1, 1, 1}) == ops::Series{4, 0, 0, 0}, "dom_freq DC");
    expect(ops::dom_freq(std::vector<double>{1, 0, -1, 0}) == ops::Series{0, 2, 0, 2}, "dom_freq cosine");
    expect(ops::dom_diff(std::vector<double>{1, 3, 2}) == ops::Series{2, -1}, "dom_diff");
    expect(ops::convolve_valid(std::vector<double>{1, 2, 3}, std::vector<double>{1, -1}) == ops::Series{-1, -1}, "convolve");
    expect(ops::shape_kernel_lengths(ops::ShapeKind::Inc, 40, 0.5) == std::vector<std::size_t>{2, 4, 8, 16}, "kernel set 40");
    std::string detail = bad.empty() ? "all hand examples exact" : "mismatches:";
    for (const auto& b : bad) {
        detail += " [" + b + "]";
    }
    return {bad.empty(), detail};
}

// -- criterion 3 ---------------------------------------------------------------

bool tree_ok(const ProgramTree& t, std::mt19937_64& gen)
{
    if (!is_valid(t)) {
        return false;
    }
    const auto z = evaluate_tree(t, random_vector(gen, t.series_length));
    if (z.size() != output_dimension(t)) {
        return false;
    }
    return std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); });
}

Outcome typed_fuzz()
{
    constexpr int kTrees = 10000;
    Rng rng(303);
    std::mt19937_64 gen(303);
    std::size_t bad = 0;
    std::size_t checked = 0;
    for (std::size_t L : {16u, 150u, 1024u}) {
        std::vector<ProgramTree> pool;
        pool.reserve(kTrees);
        for (int i = 0; i < kTrees; ++i) {
            pool.push_back(generate_tree(rng, i % 2 ? GrowMethod::Full : GrowMethod::Grow, 2 + (i / 2) % 5, L));
            bad += tree_ok(pool.back(), gen) ? 0 : 1;
            ++checked;
        }
        for (int i = 0; i < kTrees; ++i) {
            const auto& a = pool[rng.uniform_index(pool.size())];
            const auto& b = pool[rng.uniform_index(pool.size())];
            bad += tree_ok(crossover(a, b, rng), gen) ? 0 : 1;
            bad += tree_ok(mutate(a, rng), gen) ? 0 : 1;
            checked += 2;
        }
    }
    return {bad == 0, std::to_string(checked) + " trees (10000 generated, 10000 crossovers, 10000 mutations per L), "
            + std::to_string(bad) + " failures"};
}

// -- criterion 4 ---------------------------------------------------------------

Outcome selection_soundness()
{
    std::mt19937_64 gen(404);
    std::uniform_int_distribution<int> level(0, 5);
    Rng rng(404);
    std::size_t events = 0;
    std::size_t unsound = 0;
    while (events < 1000) {
        std::vector<FitnessVector> pop;
        std::vector<std::vector<double>> raw;
        for (int i = 0; i < 50; ++i) {
            std::vector<double> v(5);
            for (auto& x : v) {
                x = level(gen) / 5.0;
            }
            raw.push_back(v);
            pop.push_back(FitnessVector::from(v));
        }
        std::vector<TournamentRecord> log;
        pareto_tournament_select(pop, 14.0, 20, rng, &log);
        for (const auto& rec : log) {
            unsound += rec.selected == oracle::nondominated(raw, rec.sample) ? 0 : 1;
            for (auto a : rec.selected) {
                for (auto b : rec.selected) {
                    unsound += oracle::dominates(raw[a], raw[b]) ? 1 : 0;
                }
            }
            ++events;
        }
    }
    std::size_t order_bad = 0;
    for (int i = 0; i < 10000; ++i) {
        std::vector<FitnessVector> t;
        for (int j = 0; j < 3; ++j) {
            std::vector<double> v(5);
            for (auto& x : v) {
                x = level(gen) / 5.0;
            }
            t.push_back(FitnessVector::from(v));
        }
        order_bad += dominates(t[0], t[0]) ? 1 : 0;
        order_bad += dominates(t[0], t[1]) && dominates(t[1], t[0]) ? 1 : 0;
        order_bad += dominates(t[0], t[1]) && dominates(t[1], t[2]) && !dominates(t[0], t[2]) ? 1 : 0;
        order_bad += dominates(t[0], t[1]) != oracle::dominates(t[0].per_fold, t[1].per_fold) ? 1 : 0;
    }
    return {unsound == 0 && order_bad == 0, std::to_string(events) + " tournament events, " + std::to_string(unsound)
            + " unsound; 10000 triples, " + std::to_string(order_bad) + " order violations"};
}

// -- criteria 5 to 9 -----------------------------------------------------------

struct Split {
    std::string name;
    Dataset train;
    Dataset test;
};

Split load_split(const std::string& name)
{
    const fs::path dir = kData / name;
    Split s{name, load_ucr_tsv(dir / (name + "_TRAIN.tsv")), {}};
    s.train.name = name;
    s.test = relabel_with(load_ucr_tsv(dir / (name + "_TEST.tsv")), s.train.original_labels);
    return s;
}

struct Run {
    std::string dataset;
    std::uint64_t seed;
    Selection selection;
    EvolvedModel model;
    double test_accuracy;
};

std::vector<Run> runs;
std::size_t cli_runs_monotone_failures = 0;
std::size_t cli_runs = 0;
fs::path workdir;

Outcome determinism()
{
    const std::string train = (kData / "GunPoint" / "GunPoint_TRAIN.tsv").string();
    auto evolve_to = [&](const std::string& stem, const std::string& threads) {
        const fs::path out = workdir / (stem + ".json");
        const int code = cli({"evolve", "--train", train, "--out", out.string(), "--population", "20", "--generations", "10",
            "--seed", "5", "--threads", threads, "--quiet"});
        if (code != 0) {
            throw Error(ErrorKind::InvalidConfig, "evolve exited with " + std::to_string(code));
        }
        const auto m = deserialize_model(slurp(out));
        ++cli_runs;
        cli_runs_monotone_failures += monotone(m.history) ? 0 : 1;
        return std::pair{slurp(out), slurp(workdir / (stem + "_log.csv"))};
    };
    const auto a = evolve_to("det_a", "1");
    const auto b = evolve_to("det_b", "1");
    const auto c = evolve_to("det_c", "4");
    const bool same_runs = a == b;
    const bool same_threads = a == c;
    return {same_runs && same_threads, std::string("repeat run ") + (same_runs ? "identical" : "DIFFERS")
            + ", --threads 4 vs 1 " + (same_threads ? "identical" : "DIFFERS") + " (model JSON and log CSV)"};
}

void run_experiments()
{
    const std::vector<std::string> names{"GunPoint", "Coffee", "ItalyPowerDemand"};
    for (const auto& name : names) {
        const Split s = load_split(name);
        for (Selection sel : {Selection::Pareto, Selection::Scalar}) {
            for (std::uint64_t seed : {1u, 2u, 3u}) {
                EvoConfig cfg;
                cfg.population_size = 50;
                cfg.generations = 20;
                cfg.final_trees = 100;
                cfg.seed = seed;
                cfg.selection = sel;
                auto m = evolve(s.train, cfg);
                m.meta.dataset = name;
                const double acc = accuracy(predict_model(m, s.test), s.test.labels());
                std::printf("  run %-16s %-6s seed=%llu test_accuracy=%.4f cv_fitness=%.4f %s\n", name.c_str(),
                    std::string(selection_name(sel)).c_str(), static_cast<unsigned long long>(seed), acc, m.fitness.mean,
                    render_tree(m.tree).c_str());
                std::fflush(stdout);
                runs.push_back({name, seed, sel, std::move(m), acc});
            }
        }
    }
}

double mean_accuracy(const std::string& name, Selection sel)
{
    double sum = 0.0;
    int n = 0;
    for (const auto& r : runs) {
        if (r.dataset == name && r.selection == sel) {
            sum += r.test_accuracy;
            ++n;
        }
    }
    return sum / n;
}

Outcome effectiveness()
{
    int wins = 0;
    std::string detail;
    for (const std::string name : {"GunPoint", "Coffee", "ItalyPowerDemand"}) {
        const Split s = load_split(name);
        const double nn = accuracy(predict_1nn(s.train, s.test), s.test.labels());
        const double evo = mean_accuracy(name, Selection::Pareto);
        wins += evo >= nn ? 1 : 0;
        detail += name + " " + fmt(evo) + " vs 1-NN " + fmt(nn) + (evo >= nn ? " (>=)" : " (<)") + "; ";
    }
    detail += std::to_string(wins) + "/3 at or above the baseline (ItalyPowerDemand stands in for ECG200)";
    return {wins >= 2, detail};
}

Outcome ablation()
{
    int wins = 0;
    std::string detail;
    for (const std::string name : {"GunPoint", "Coffee", "ItalyPowerDemand"}) {
        const double p = mean_accuracy(name, Selection::Pareto);
        const double s = mean_accuracy(name, Selection::Scalar);
        wins += p >= s ? 1 : 0;
        detail += name + " pareto " + fmt(p) + " vs scalar " + fmt(s) + "; ";
    }
    detail += std::to_string(wins) + "/3 with pareto >= scalar";
    return {wins >= 2, detail};
}

Outcome monotonicity()
{
    std::size_t bad = cli_runs_monotone_failures;
    for (const auto& r : runs) {
        bad += monotone(r.model.history) ? 0 : 1;
    }
    const std::size_t total = runs.size() + cli_runs;
    return {bad == 0 && total > 0, std::to_string(total) + " runs checked, " + std::to_string(bad) + " with a decrease"};
}

Outcome cost_envelope()
{
    std::size_t over = 0;
    std::uint64_t max_flops = 0;
    std::uint64_t max_peak = 0;
    for (const auto& r : runs) {
        if (r.selection != Selection::Pareto) {
            continue;
        }
        const auto c = cost_report(r.model.tree);
        max_flops = std::max(max_flops, c.flops);
        max_peak = std::max(max_peak, c.peak_bytes);
        over += c.flops <= 10'000'000 && c.peak_bytes <= 100'000 ? 0 : 1;
    }
    std::size_t gunpoint_fit = 0;
    for (const auto& r : runs) {
        if (r.dataset != "GunPoint" || r.selection != Selection::Pareto) {
            continue;
        }
        const fs::path p = workdir / ("gunpoint_seed" + std::to_string(r.seed) + ".json");
        std::ofstream(p, std::ios::binary) << serialize_model(r.model);
        std::string out;
        if (cli({"cost", "--model", p.string()}, &out) == 0
            && out.find("fits_stm32f446re=true fits_stm32l552ze=true") != std::string::npos) {
            ++gunpoint_fit;
        }
    }
    return {over == 0 && gunpoint_fit >= 1, std::to_string(over) + " models over the envelope (max flops "
            + std::to_string(max_flops) + ", max peak_bytes " + std::to_string(max_peak) + "); "
            + std::to_string(gunpoint_fit) + "/3 GunPoint models fit both devices via the cost command"};
}

// -- criterion 10 --------------------------------------------------------------

Outcome classifier_sanity()
{
    std::mt19937_64 gen(1010);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto blobs = [&](std::size_t n) {
        FeatureMatrix m(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = static_cast<int>(i % 2);
            m.values[2 * i] = noise(gen) + 6.0 * c;
            m.values[2 * i + 1] = noise(gen) + 6.0 * c;
            m.labels.push_back(c);
        }
        return m;
    };
    const auto all = blobs(200);
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < 200; ++i) {
        (i % 4 == 3 ? te : tr).push_back(i);
    }
    const auto train = all.select_rows(tr);
    const auto test = all.select_rows(te);
    const double holdout = accuracy(predict(fit_extra_trees(train, train.labels, 100, 10), test), test.labels);

    FeatureMatrix two(2, 1);
    two.values = {0.0, 1.0};
    two.labels = {0, 1};
    const double two_acc = accuracy(predict(fit_extra_trees(two, two.labels, 100, 10), two), two.labels);

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FeatureMatrix a(100, 8), b(100, 8);
    for (auto& v : a.values) {
        v = u(gen);
    }
    for (auto& v : b.values) {
        v = u(gen);
    }
    for (int i = 0; i < 100; ++i) {
        a.labels.push_back(i % 3);
    }
    const auto nn = predict_1nn(a, b);
    const auto brute = oracle::nearest_neighbor(a, b);
    const bool nn_ok = nn == brute;
    return {holdout >= 0.99 && two_acc == 1.0 && nn_ok, "blob holdout " + fmt(holdout) + ", two-point training "
            + fmt(two_acc) + ", 1-NN " + (nn_ok ? "matches" : "DIFFERS FROM") + " brute force on 100 instances"};
}

} // namespace

int main()
{
    workdir = fs::temp_directory_path() / ("tsgp_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(workdir);
    const auto t0 = Clock::now();

    report(1, "operator oracle equivalence", dft_oracle, 5.0);
    report(2, "pipeline hand checks", hand_checks, 1.0);
    report(3, "typed-tree fuzz", typed_fuzz, 60.0);
    report(4, "selection soundness", selection_soundness, 10.0);
    report(5, "determinism", determinism, 600.0);

    const auto e0 = Clock::now();
    std::printf("  running 18 evolve runs (3 datasets x 2 selection schemes x 3 seeds, pop 50, gen 20)\n");
    run_experiments();
    std::printf("  experiments took %.1f s\n", std::chrono::duration<double>(Clock::now() - e0).count());

    report(6, "elitist monotonicity", monotonicity);
    report(7, "effectiveness at desk scale", effectiveness);
    report(8, "pareto vs scalar selection", ablation);
    report(9, "cost envelope", cost_envelope);
    report(10, "classifier sanity", classifier_sanity);

    std::printf("%d of 10 criteria failed, total %.1f s\n", failures,
        std::chrono::duration<double>(Clock::now() - t0).count());
    fs::remove_all(workdir);
    return failures == 0 ? 0 : 1;
}
