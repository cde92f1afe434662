#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldpe/distributions.hpp"
#include "ldpe/ldp.hpp"
#include "ldpe/rng.hpp"
#include "ldpe/tree_model.hpp"

namespace ldpe {

// Round structure of a protocol run: sequential pools talk to one user at a
// time (each contact is its own round, so rounds == users consumed);
// non-interactive pools answer everything in a single concurrent round and
// reject queries once that round is sealed.
enum class PoolMode { sequential, non_interactive };

// One consumed batch: users [start, start + count), each of whom sent
// bits_each bits. Batches tile the consumed prefix, so per-user accounting
// is reconstructible exactly.
struct BatchRecord {
    std::uint64_t start = 0;
    std::uint64_t count = 0;
    std::uint32_t bits_each = 0;
};

struct PoolAudit {
    std::uint64_t users_total = 0;
    std::uint64_t users_consumed = 0;
    std::uint64_t total_bits = 0;
    std::uint32_t max_bits_per_user = 0;
    std::uint64_t rounds = 0;
    std::uint64_t batches = 0;
};

// The result envelope every estimator returns: the estimate plus the exact
// resource accounting of the run and an estimator-specific audit payload.
struct EstimateReport {
    double value = 0.0;
    std::uint64_t users_consumed = 0;
    std::uint32_t max_bits_per_user = 0;
    std::uint64_t rounds = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> extras;
    std::map<std::string, std::vector<double>> series;
};

// A population of n users, each holding one i.i.d. sample, consumed in index
// order and never contacted twice. Tree and categorical pools are lazy: a
// user's sample is a pure function of (pool seed, user index), evaluated on
// demand, so pools sized in the tens of millions cost no memory.
// Materialized pools hold explicit samples for replay and mutation tests.
class UserPool {
  public:
    std::uint64_t size() const { return n_; }
    std::uint64_t users_consumed() const { return cursor_; }
    std::uint64_t remaining() const { return n_ - cursor_; }
    bool consumed(std::uint64_t user) const { return user < cursor_; }
    PoolMode mode() const { return mode_; }

    // Coordinate dimension for full-sample pools, 0 for scalar pools.
    std::size_t dimension() const;
    // Scalar support for value pools, 0 for full-sample pools.
    std::uint32_t support() const;
    // Seed of the lazy sample law (0 for materialized pools); lets tests
    // materialize the identical population.
    std::uint64_t sample_seed() const { return seed_; }

    // Raw sample access for the channel layer. What the server learns is
    // only ever the privatized symbol computed from these.
    std::uint8_t coordinate(std::uint64_t user, std::size_t v) const;
    std::uint32_t value(std::uint64_t user) const;

    // Consumes the next `count` unconsumed users, charging each bits_each
    // bits, and returns the index of the first one. Throws InsufficientUsers
    // when fewer remain, ProtocolViolation on a sealed non-interactive pool.
    std::uint64_t take_users(std::uint64_t count, std::uint32_t bits_each);

    // Closes the single round of a non-interactive pool; later queries throw.
    void seal_round();

    // Bits transmitted by one user (0 if unconsumed).
    std::uint32_t bits_sent(std::uint64_t user) const;

    std::uint64_t rounds() const;

    PoolAudit audit() const;

    const std::vector<BatchRecord>& batch_log() const { return batches_; }

    friend UserPool pool_from_tree(const TreeModel& model, std::uint64_t n, Rng& rng,
                                   PoolMode mode);
    friend UserPool pool_from_categorical(const CategoricalDistribution& dist, std::uint64_t n,
                                          Rng& rng, PoolMode mode);
    friend UserPool pool_from_samples(std::vector<std::vector<std::uint8_t>> samples,
                                      PoolMode mode);
    friend UserPool pool_from_values(std::vector<std::uint32_t> values, std::uint32_t support,
                                     PoolMode mode);

  private:
    UserPool() = default;

    enum class Backend { lazy_tree, lazy_categorical, bit_samples, scalar_values };

    Backend backend_ = Backend::bit_samples;
    PoolMode mode_ = PoolMode::sequential;
    std::uint64_t n_ = 0;
    std::uint64_t cursor_ = 0;
    bool sealed_ = false;
    std::uint64_t seed_ = 0;

    std::optional<CompiledTree> tree_;
    std::optional<AliasSampler> alias_;
    std::uint32_t support_k_ = 0;
    std::size_t dim_ = 0;
    std::vector<std::vector<std::uint8_t>> samples_;
    std::vector<std::uint32_t> values_;

    std::vector<BatchRecord> batches_;
};

// n i.i.d. full samples from the tree model, lazily evaluated.
UserPool pool_from_tree(const TreeModel& model, std::uint64_t n, Rng& rng,
                        PoolMode mode = PoolMode::sequential);

// n i.i.d. scalar samples from the categorical distribution, lazily evaluated.
UserPool pool_from_categorical(const CategoricalDistribution& dist, std::uint64_t n, Rng& rng,
                               PoolMode mode = PoolMode::sequential);

// Explicit full samples (one bit vector per user).
UserPool pool_from_samples(std::vector<std::vector<std::uint8_t>> samples,
                           PoolMode mode = PoolMode::sequential);

// Explicit scalar samples over [support].
UserPool pool_from_values(std::vector<std::uint32_t> values, std::uint32_t support,
                          PoolMode mode = PoolMode::sequential);

// Flattened symbol of a user's coordinates (i, j) or (i, j, k): the bit of
// the SMALLEST index is least significant, regardless of argument order.
std::uint32_t pair_symbol(const UserPool& pool, std::uint64_t user, std::size_t i, std::size_t j);
std::uint32_t triplet_symbol(const UserPool& pool, std::uint64_t user, std::size_t i,
                             std::size_t j, std::size_t k);

// Consume one user and return the randomized-response-privatized symbol of
// the requested coordinates. Charges ceil(log2 support) bits (2 for pairs,
// 3 for triplets).
std::uint32_t request_pair(UserPool& pool, std::size_t i, std::size_t j,
                           const PrivacyBudget& budget, Rng& rng);
std::uint32_t request_triplet(UserPool& pool, std::size_t i, std::size_t j, std::size_t k,
                              const PrivacyBudget& budget, Rng& rng);

// Consume one user of a scalar pool and return its hash-channel response
// under salt q. Charges b bits.
std::uint32_t request_hash(UserPool& pool, std::uint64_t q, const HashChannelParams& params,
                           Rng& rng);

// Batched queries: consume `count` users and return the histogram of their
// privatized symbols over the product alphabet (size 2, 4, or 8). One batch
// record; identical per-user behavior to the single-shot forms.
std::vector<std::uint64_t> request_marginal_batch(UserPool& pool, std::size_t i,
                                                  const PrivacyBudget& budget,
                                                  std::uint64_t count, Rng& rng);
std::vector<std::uint64_t> request_pair_batch(UserPool& pool, std::size_t i, std::size_t j,
                                              const PrivacyBudget& budget, std::uint64_t count,
                                              Rng& rng);
std::vector<std::uint64_t> request_triplet_batch(UserPool& pool, std::size_t i, std::size_t j,
                                                 std::size_t k, const PrivacyBudget& budget,
                                                 std::uint64_t count, Rng& rng);

}  // namespace ldpe
