#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldpe/plugin_estimators.hpp"
#include "ldpe/protocol.hpp"
#include "ldpe/rng.hpp"

namespace ldpe {

// One experiment run: which task, its estimator parameters, and the trial
// plan. Every experiment is fully determined by this struct plus nothing
// else — identical configs produce byte-identical CSV output.
struct ExperimentConfig {
    std::string task;  // shannon-tree | shannon-chain | shannon-star |
                       // gini | collision | fig1a | fig1b
    std::uint32_t d = 20;       // variable count for tree/chain/star tasks
    std::uint32_t k = 1000;     // scalar support for gini/collision/fig1b
    double epsilon = 0.25;
    double delta = 0.2;
    double alpha = 1.0;
    std::uint32_t b = 1;        // hash width for gini/collision/fig1b
    double sample_constant = kDefaultSampleConstant;
    std::uint64_t users = 100000;  // pool size for gini/collision tasks
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    std::uint32_t threads = 1;
    std::string scalar_dist = "exponential";  // exponential | uniform
    std::vector<std::uint32_t> d_grid;          // fig1a
    std::vector<std::uint64_t> budget_grid;     // fig1b, total bits per trial

    // Task-appropriate defaults; fig1a swaps in the cheaper scan profile
    // (delta = 0.7, sample_constant = 2) that keeps the full grid in minutes.
    static ExperimentConfig defaults_for(const std::string& task);

    void validate() const;
};

// One CSV row. Fields that do not apply to a task are zero (or nan for the
// value columns of analytic rows that never ran a protocol).
struct ResultRow {
    std::string task;
    std::string method;
    std::uint32_t d = 0;
    std::uint32_t k = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    std::uint32_t b = 0;
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double truth = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    std::uint64_t users_consumed = 0;
    std::uint64_t distinct_pairs = 0;
    std::uint64_t bits_total = 0;
    std::uint64_t rounds = 0;
};

// Shortest decimal round-trip formatting ("%.17g"); the one double format
// used everywhere CSV bytes must be reproducible.
std::string format_double(double x);

// UTF-8, comma-delimited, one header row; optional leading '#' comment lines.
void write_csv(const std::string& path, const std::vector<ResultRow>& rows,
               const std::vector<std::string>& comments = {});
std::string csv_to_string(const std::vector<ResultRow>& rows,
                          const std::vector<std::string>& comments = {});

double mean(const std::vector<double>& v);
double stderr_of_mean(const std::vector<double>& v);
double median(std::vector<double> v);  // averages the middle pair; infs sort high

// Pair-count scaling experiment: for each d in the grid, `trials` random tree
// models, the adaptive estimator's distinct-pair count per trial, plus one
// analytic row per d for the exhaustive pairwise baseline's d(d-1)/2.
std::vector<ResultRow> run_fig1a(const ExperimentConfig& config);

// Collision-entropy error vs total bit budget on the exponential
// distribution: the non-private disjoint-pair baseline (ceil(log2 k) bits per
// user on a tenth of the budget's users), the pairwise-hash estimator with
// lambda = 1, and the same estimator at the configured alpha, all at b = 1.
std::vector<ResultRow> run_fig1b(const ExperimentConfig& config);

// gini | collision | shannon-tree | shannon-chain | shannon-star: `trials`
// independent runs of the named estimator on fresh models/pools.
std::vector<ResultRow> run_estimator_task(const ExperimentConfig& config);

// Dispatch on config.task.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

// Exhaustive-pairwise tree-entropy baseline: every unordered pair gets an
// (alpha, epsilon, delta/d^2)-good mutual-information estimate, an exact
// maximum spanning tree is built over those estimates, and the entropy
// plug-in reuses the tree edges' cached values plus d fresh
// (alpha, epsilon, delta/d)-good marginals. extras: pairs_estimated;
// series: mst_edges as flat (i, j) pairs.
EstimateReport run_chow_liu_baseline(UserPool& pool, std::uint32_t d, double alpha,
                                     double epsilon, double delta,
                                     double sample_constant, Rng& rng);

// Aggregates rows into a per-series plot table: task, method, x, y, yerr, n.
// fig1a: x = d, y = mean distinct pairs, yerr = stderr. fig1b: x = bits
// total, y = median relative error, yerr = half the interquartile range.
// Anything else: x = d (or k for scalar tasks), y = mean estimate.
void emit_plot_data(const std::vector<ResultRow>& rows, const std::string& path);
std::string plot_data_to_string(const std::vector<ResultRow>& rows);

}  // namespace ldpe
