#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ldpe/distributions.hpp"
#include "ldpe/rng.hpp"

namespace ldpe {

// Tree-structured joint distribution over d Boolean variables: a spanning
// tree of pairwise dependencies, a Bernoulli marginal per node, and one
// coupling per edge that tilts the pairwise joint away from independence
// while keeping every cell positive and both marginals intact.
struct TreeModel {
    std::size_t d = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // d-1 edges, a spanning tree
    std::vector<double> marginal_params;                     // p_i = P(X_i = 1)
    std::vector<double> couplings;                           // r per edge, aligned with edges

    // Checks: edge set is a spanning tree, marginals strictly inside (0,1),
    // and every pairwise cell probability strictly positive.
    // Throws std::invalid_argument on violation.
    void validate() const;
};

// The four pairwise cell probabilities of an edge (i, j) with marginals
// (p_i, p_j) and coupling r, as {P(0,0), P(0,1), P(1,0), P(1,1)}:
//   P(0,0) = (1-p_i)(1-p_j) + r      P(0,1) = (1-p_i) p_j - r
//   P(1,0) = p_i (1-p_j) - r         P(1,1) = p_i p_j + r
// Both implied marginals equal (p_i, p_j) exactly for any r.
std::array<double, 4> edge_cells(double p_i, double p_j, double r);

// The valid open coupling interval (lo, hi) keeping all four cells positive:
// lo = max(-(1-p_i)(1-p_j), -p_i p_j), hi = min((1-p_i) p_j, p_i (1-p_j)).
std::pair<double, double> coupling_bounds(double p_i, double p_j);

// Exact 2x2 joint table of one edge, axes ordered (first, second) as stored.
JointTable edge_joint(const TreeModel& model, std::size_t edge_index);

// Exact joint entropy in bits: sum of marginal entropies minus the sum of
// edge mutual informations (the spanning-tree decomposition of the joint).
double tree_true_entropy(const TreeModel& model);

// Random model: tree = maximum spanning tree of the complete graph with
// i.i.d. standard-normal edge weights; p_i uniform on (0,1); couplings
// uniform on 0.99x the valid interval so every cell stays strictly positive.
TreeModel random_tree_model(std::size_t d, Rng& rng);

// Chain with the given node order; marginal p at every node; one coupling per
// adjacent pair (couplings.size() == order.size()-1).
TreeModel make_chain_model(const std::vector<std::size_t>& order, double p,
                           const std::vector<double>& couplings);

// Star on d nodes with the given center; marginal p everywhere; one coupling
// per leaf in node order (skipping the center).
TreeModel make_star_model(std::size_t d, std::size_t center, double p,
                          const std::vector<double>& couplings);

// Solves for the coupling r >= 0 that makes the edge's mutual information
// equal target_bits, for symmetric marginals p_i = p_j = p (monotone in r).
// Throws if the target exceeds what the marginals allow.
double coupling_for_target_mi(double p, double target_bits);

// Deterministic ancestral sampler compiled from a model: node 0 is the root;
// every other node draws from the conditional implied by its tree edge. The
// per-(user, node) uniforms are addressed by counters, so any coordinate of
// any user can be evaluated independently and always yields the same value.
class CompiledTree {
  public:
    explicit CompiledTree(const TreeModel& model);

    std::size_t d() const { return order_.size(); }

    // Coordinate v of user u under pool seed `seed` (evaluates the root path).
    std::uint8_t coordinate(std::uint64_t seed, std::uint64_t user, std::size_t v) const;

    // All d coordinates of user u (single root-to-leaves pass).
    std::vector<std::uint8_t> full_sample(std::uint64_t seed, std::uint64_t user) const;

    // Ancestral sampling driven by a sequential RNG (one uniform per node in
    // breadth-first order).
    std::vector<std::uint8_t> sample(Rng& rng) const;

  private:
    double node_success(std::size_t v, std::uint8_t parent_value) const;

    std::vector<std::size_t> order_;    // breadth-first from the root
    std::vector<std::size_t> parent_;   // parent_[root] == root
    std::vector<std::size_t> depth_;
    double root_p1_ = 0.5;
    // cond_[v][pv] = P(X_v = 1 | X_parent = pv) for v != root.
    std::vector<std::array<double, 2>> cond_;
};

// Draws one full sample via ancestral sampling (convenience wrapper that
// compiles the model; compile once with CompiledTree for bulk use).
std::vector<std::uint8_t> sample_full(const TreeModel& model, Rng& rng);

// Exact joint over all d variables by enumeration, indexed so that bit v of
// the flat index is X_v. Intended for test oracles; guarded to d <= 20.
std::vector<double> brute_force_joint(const TreeModel& model);

// Exact marginal table over up to three nodes (axis order = vars as given),
// computed by brute-force enumeration. Test-oracle helper, d <= 20.
JointTable exact_marginal(const TreeModel& model, const std::vector<std::size_t>& vars);

}  // namespace ldpe
