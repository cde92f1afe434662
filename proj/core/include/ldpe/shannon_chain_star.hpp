#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ldpe/plugin_estimators.hpp"
#include "ldpe/protocol.hpp"
#include "ldpe/rng.hpp"
#include "ldpe/tree_model.hpp"

namespace ldpe {

// Threshold and confidence parameters shared by the chain and star
// estimators. epsilon is both the decision threshold of the conditional-
// independence tests and the per-term accuracy of the final plug-in.
struct CmiTestConfig {
    double epsilon = 0.1;
    double alpha = 1.0;
    double delta = 0.1;
    double sample_constant = kDefaultSampleConstant;
};

// Estimate sources the structure-recovery algorithms consume. Each takes the
// per-call confidence parameter (set by the caller's union bound) and
// returns the estimate in bits. The private protocol binds these to a user
// pool; tests may bind exact oracles computed from the model, under which
// recovery must be deterministic.
struct EstimatorHooks {
    // I(X_i; X_j | X_k): the conditioned variable is the LAST argument.
    std::function<double(std::size_t i, std::size_t j, std::size_t k, double delta)> cmi;
    std::function<double(std::size_t i, std::size_t j, double delta)> mi;
    std::function<double(std::size_t i, double delta)> entropy;
};

// Exact oracles from the model itself (confidence parameters ignored).
EstimatorHooks exact_hooks(const TreeModel& model);

// Private estimates against a pool: every call is an (alpha, epsilon,
// delta)-good plug-in estimate with the delta the algorithm passes in.
EstimatorHooks pool_hooks(UserPool& pool, const CmiTestConfig& cfg, Rng& rng);

// One thresholded conditional-independence probe: estimates I(X_i; X_j | X_k)
// at confidence delta_prime and reports whether it exceeds cfg.epsilon.
// A false answer is evidence that X_k separates X_i from X_j.
bool cmi_exceeds(const EstimatorHooks& hooks, std::size_t i, std::size_t j, std::size_t k,
                 double epsilon, double delta_prime, std::uint64_t* test_counter = nullptr);
bool cmi_exceeds(UserPool& pool, std::size_t i, std::size_t j, std::size_t k,
                 const CmiTestConfig& cfg, double delta_prime, Rng& rng);

// Locates where j belongs inside order[lo..hi], given that it lies strictly
// between order[lo] and order[hi] on the chain: bisects on the test
// "does conditioning on X_j separate order[lo] from the midpoint?", which
// holds exactly when j sits in the lower half. Returns l such that j belongs
// between order[l] and order[l+1]; performs at most ceil(log2(hi - lo))
// tests (zero when hi == lo + 1).
std::size_t ternary_search(const std::vector<std::size_t>& order, std::size_t lo, std::size_t hi,
                           std::size_t j, const EstimatorHooks& hooks, double epsilon,
                           double delta_prime, std::uint64_t* test_counter = nullptr);

struct ChainRecovery {
    std::vector<std::size_t> order;
    std::uint64_t cmi_tests = 0;
};

// Recovers a chain order consistent with the data, up to reversal: seeds
// from the triplet (0, 1, 2) — the member whose conditioning kills the
// dependence of the other two is the middle — then inserts each remaining
// variable at the head, at the tail, or inside via ternary_search.
// Throws ChainAssumptionViolated when no seed test clears epsilon.
ChainRecovery recover_chain_order(std::size_t d, const EstimatorHooks& hooks, double epsilon,
                                  double delta_per_test);

struct StarRecovery {
    std::size_t center = 0;
    std::size_t probe = 0;  // the initial random node i
    std::size_t rival = 0;  // k = argmax_j of the probe's pairwise estimates
    double probe_sum = 0.0;
    double rival_sum = 0.0;
    std::uint64_t mi_estimates = 0;
};

// Star-center identification: estimates I(X_probe; X_j) for all j, takes the
// argmax as the rival k, estimates that row too, and declares whichever of
// probe/k has the larger row sum the center. 2(d-1) estimates.
StarRecovery recover_star_center(std::size_t d, std::size_t probe, const EstimatorHooks& hooks,
                                 double delta_per_estimate);

// Full private runs: recovery with union-bounded per-test confidence,
// followed by the tree plug-in (marginal entropies minus edge mutual
// informations) on the recovered structure.
EstimateReport estimate_chain_entropy(UserPool& pool, std::size_t d, const CmiTestConfig& cfg,
                                      Rng& rng);
EstimateReport estimate_star_entropy(UserPool& pool, std::size_t d, const CmiTestConfig& cfg,
                                     Rng& rng);

}  // namespace ldpe
