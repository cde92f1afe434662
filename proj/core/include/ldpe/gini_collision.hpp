#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ldpe/protocol.hpp"
#include "ldpe/rng.hpp"

namespace ldpe {

// Disjoint pairing of users by consecutive indices: pair t holds users
// (2t, 2t+1) with shared salt q = t. An odd trailing user is left out (it is
// neither consumed nor charged). The salt vector gives every unpaired user a
// unique value so q_i == q_j exactly when i and j are paired.
struct PairingPlan {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    std::vector<std::uint64_t> q;  // per-user salt

    static PairingPlan consecutive(std::uint64_t n);
};

struct CollisionTally {
    std::uint64_t m = 0;           // pairs tallied
    std::uint64_t collisions = 0;  // pairs whose two responses matched
    double c_bar = 0.0;            // collisions / m
};

// Exact inverse of the response channel's expectation: recovers g_bar from
// c_bar = lambda^2 (1 - 2^-b) g_bar + 2^-b via (2^b c_bar - 1)/(lambda^2 (2^b - 1)).
double invert_collision_rate(double c_bar, std::uint32_t b, double lambda);

// Round-trip of the expectation map and its inversion; the identity on g_bar.
double bias_correction_roundtrip(double g_bar, std::uint32_t b, double lambda);

// The single-round pairwise-hash estimator of Gini and collision entropy:
// pairs the pool's users, collects each user's b-bit salted-hash response,
// tallies pair collisions, and inverts the channel bias. Requires a
// non-interactive pool with n >= 2; consumes 2*floor(n/2) users at exactly
// b bits each and seals the round.
//
// Report: value = collision entropy estimate in bits (+infinity-flagged when
// the collision probability estimate is <= 0, clamped to 0 when it
// overshoots 1). extras: lambda, c_bar, collision_prob_hat (the estimate of
// Pr[X = X']), gini_hat = 1 - collision_prob_hat, saturated (0/1).
EstimateReport run_gini_collision(UserPool& pool, std::uint32_t b, double alpha,
                                  std::uint64_t hash_seed, Rng& rng);

// Non-private comparator: exact collision counting over disjoint pairs of
// raw samples at ceil(log2 support) bits per user, one round. Report value =
// -log2(c_bar), +infinity-flagged when no collisions were seen.
EstimateReport skorski_baseline(UserPool& pool, std::uint32_t support);

}  // namespace ldpe
