#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ldpe/rng.hpp"

namespace ldpe {

// Probability vector over a finite support {0, ..., k-1}.
struct CategoricalDistribution {
    std::vector<double> probs;

    std::size_t support() const { return probs.size(); }

    // Checks the invariants: k >= 1, entries >= 0, sum within 1e-12 of 1.
    // Throws std::invalid_argument on violation.
    void validate() const;
};

// Dense joint probability table over one to three variables.
// mass is row-major with the FIRST variable as the most significant axis:
// for dims {a, b}, mass[x*b + y] = P(X=x, Y=y).
struct JointTable {
    std::vector<std::size_t> dims;
    std::vector<double> mass;

    std::size_t total_cells() const;
    void validate() const;

    double& at(std::size_t x, std::size_t y);
    double at(std::size_t x, std::size_t y) const;
    double& at(std::size_t x, std::size_t y, std::size_t z);
    double at(std::size_t x, std::size_t y, std::size_t z) const;

    // Sum out all variables except those in `keep` (indices into dims,
    // ascending). The result's axes follow the order given in `keep`.
    JointTable marginalize(const std::vector<std::size_t>& keep) const;

    // Flattened view as a categorical over the product alphabet.
    CategoricalDistribution flatten() const;
};

// Shannon entropy in bits: -sum p log2 p, with 0 log 0 := 0.
double shannon_entropy(const CategoricalDistribution& dist);

// Gini entropy: 1 - sum p^2 (dimensionless, in [0, 1 - 1/k]).
double gini_entropy(const CategoricalDistribution& dist);

// Collision entropy in bits: -log2 sum p^2 == -log2(1 - gini).
double collision_entropy(const CategoricalDistribution& dist);

// Entropy of the joint table seen as one categorical variable.
double shannon_entropy(const JointTable& joint);

// I(X; Y) = H(X) + H(Y) - H(X, Y) on a 2-variable table, in bits.
// Computed exactly from the table; not clamped (small negatives can appear
// from floating-point cancellation and callers decide how to report them).
double mutual_information(const JointTable& joint);

// I(X; Y | Z) = H(X,Z) + H(Y,Z) - H(X,Y,Z) - H(Z) on a 3-variable table
// with axis order (X, Y, Z), in bits.
double conditional_mutual_information(const JointTable& joint);

// Discrete exponential distribution p_i proportional to e^{-i} for
// i = 1..k, normalized.
CategoricalDistribution exponential_distribution(std::size_t k);

// Walker alias table for O(1) categorical sampling; deterministic
// construction so seeded draws are reproducible.
class AliasSampler {
  public:
    explicit AliasSampler(const CategoricalDistribution& dist);

    // Draws using two independent uniforms (bucket choice + coin).
    std::size_t sample(double u_bucket, double u_coin) const;
    std::size_t sample(Rng& rng) const {
        double ub = rng.uniform01();
        double uc = rng.uniform01();
        return sample(ub, uc);
    }

  private:
    std::vector<double> accept_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace ldpe
