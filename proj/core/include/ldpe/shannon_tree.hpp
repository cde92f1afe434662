#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "ldpe/plugin_estimators.hpp"
#include "ldpe/protocol.hpp"
#include "ldpe/rng.hpp"

namespace ldpe {

struct TreeEstimatorConfig {
    double alpha = 1.0;
    double epsilon = 0.25;
    double delta = 0.2;
    std::uint32_t support = 2;  // per-variable support c (Boolean models: 2)
    double sample_constant = kDefaultSampleConstant;
    // Levels whose admission threshold exceeds log2(c) can admit no edge —
    // a valid pairwise table's mutual information is capped at log2(c) — so
    // they are resolved without queries. Disable only to cross-check that
    // the shortcut changes nothing (it still draws the same randomness).
    bool threshold_shortcut = true;
};

// Heavy-tailed integer threshold: Z = floor(1/U) for U uniform on (0, 1],
// so Pr[Z >= z] = 1/z for every integer z >= 1.
std::uint64_t sample_threshold(Rng& rng);

// Audit state of one run: the level/repetition grid, the per-pair estimate
// cache (at most one entry per unordered pair over the whole run), and the
// accumulators of the weight identity.
struct MstEstimatorState {
    std::uint64_t M = 0;  // threshold levels: ceil(2 log2(c) / epsilon)
    std::uint64_t R = 0;  // repetitions per level: ceil(ln(1/delta) / epsilon^2)
    std::map<std::pair<std::size_t, std::size_t>, double> edge_cache;
    std::vector<double> eta_hat;  // per-level component-count estimates
    double W_hat = 0.0;
    double S_hat = 0.0;
    double H_hat = 0.0;
};

// The estimate sources the algorithm consumes: a fresh pairwise mutual
// information estimate and a fresh marginal entropy estimate. The private
// protocol binds these to a user pool; tests may bind exact oracles instead.
struct TreeEstimatorHooks {
    std::function<double(std::size_t i, std::size_t j)> mi;
    std::function<double(std::size_t i)> marginal_entropy;
};

// Core loop of the tree-entropy estimator, driven by the given estimate
// sources: estimates the maximum-spanning-tree weight of the mutual-
// information graph by thresholded component counting (random start, capped
// breadth-first search, cache shared across all levels), subtracts it from
// the summed marginal entropies. Resource fields of the report are zero;
// the pool-backed wrapper below fills them.
EstimateReport estimate_tree_entropy_with_hooks(const TreeEstimatorHooks& hooks, std::size_t d,
                                                const TreeEstimatorConfig& cfg, Rng& rng,
                                                MstEstimatorState* state_out = nullptr);

// Private protocol run: mutual-information estimates are (alpha, eps/2,
// delta/d^2)-good pair queries, marginal entropies (alpha, eps, delta/d)-good
// queries, all against the pool with its exact accounting.
EstimateReport estimate_tree_entropy(UserPool& pool, std::size_t d,
                                     const TreeEstimatorConfig& cfg, Rng& rng,
                                     MstEstimatorState* state_out = nullptr);

// Exact identity behind the estimator, checkable without any randomness:
// for a connected graph whose weights are the integer levels 1..M times
// epsilon (0 = absent edge), returns {maximum-spanning-tree weight via
// Kruskal, epsilon*M*d - epsilon * sum of threshold-subgraph component
// counts}. The two are equal on every valid input. Throws
// std::invalid_argument for disconnected graphs or levels above M.
std::pair<double, double> mst_weight_identity_check(
    const std::vector<std::vector<std::uint32_t>>& weight_levels, double epsilon,
    std::uint64_t M);

}  // namespace ldpe
