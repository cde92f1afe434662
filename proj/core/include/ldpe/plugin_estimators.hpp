#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ldpe/distributions.hpp"
#include "ldpe/protocol.hpp"
#include "ldpe/rng.hpp"

namespace ldpe {

// Default multiplier in the sample-count rule below; every estimator config
// surfaces it as a knob.
inline constexpr double kDefaultSampleConstant = 8.0;

// Parameters of one private plug-in estimate: with n_samples privatized
// observations, the estimate lands within epsilon of the truth with
// probability at least 1 - delta.
struct GoodEstimateSpec {
    double alpha = 1.0;
    double epsilon = 0.25;
    double delta = 0.05;
    std::uint32_t support = 2;    // product support of the queried variable set
    std::uint64_t n_samples = 0;

    // n_samples = ceil(K * support^2 * ln(1/delta) / (epsilon^2 * alpha^2)).
    // Requires finite alpha > 0, 0 < epsilon <= 1/2 (InvalidEpsilon
    // otherwise), 0 < delta < 1, support >= 2.
    static GoodEstimateSpec make(double alpha, double epsilon, double delta,
                                 std::uint32_t support,
                                 double sample_constant = kDefaultSampleConstant);
};

// Estimates the joint table of 1-3 coordinates from one batch of
// n_samples randomized-response observations over the product alphabet:
// inverts the channel, projects to the simplex, and arranges axes in the
// order the variables were given. spec.support must equal 2^vars.size().
// Consumes exactly spec.n_samples users at ceil(log2 support) bits each.
JointTable estimate_joint_table(UserPool& pool, const std::vector<std::size_t>& vars,
                                const GoodEstimateSpec& spec, Rng& rng);

// Plug-in Shannon entropy of the estimated joint of `vars`, in bits.
double good_entropy_estimate(UserPool& pool, const std::vector<std::size_t>& vars,
                             const GoodEstimateSpec& spec, Rng& rng);

// Plug-in mutual information of (i, j) from a single estimated pair table
// (one query batch; all terms from the same table).
double good_mi_estimate(UserPool& pool, std::size_t i, std::size_t j,
                        const GoodEstimateSpec& spec, Rng& rng);

// Plug-in conditional mutual information I(X_i; X_j | X_k) from a single
// estimated triplet table.
double good_cmi_estimate(UserPool& pool, std::size_t i, std::size_t j, std::size_t k,
                         const GoodEstimateSpec& spec, Rng& rng);

}  // namespace ldpe
