#include "ldpe/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#include "ldpe/errors.hpp"

namespace ldpe {

std::size_t UserPool::dimension() const { return dim_; }

std::uint32_t UserPool::support() const { return support_k_; }

std::uint8_t UserPool::coordinate(std::uint64_t user, std::size_t v) const {
    if (user >= n_ || v >= dim_) throw std::out_of_range("coordinate out of range");
    switch (backend_) {
        case Backend::lazy_tree: return tree_->coordinate(seed_, user, v);
        case Backend::bit_samples: return samples_[user][v];
        default: throw std::logic_error("pool holds scalar samples, not coordinates");
    }
}

std::uint32_t UserPool::value(std::uint64_t user) const {
    if (user >= n_) throw std::out_of_range("user out of range");
    switch (backend_) {
        case Backend::lazy_categorical:
            return static_cast<std::uint32_t>(alias_->sample(uniform01_at(seed_, user, 0),
                                                             uniform01_at(seed_, user, 1)));
        case Backend::scalar_values: return values_[user];
        default: throw std::logic_error("pool holds full samples, not scalar values");
    }
}

std::uint64_t UserPool::take_users(std::uint64_t count, std::uint32_t bits_each) {
    if (mode_ == PoolMode::non_interactive && sealed_)
        throw ProtocolViolation("non-interactive round already sealed");
    if (count > n_ - cursor_)
        throw InsufficientUsers("pool exhausted: need " + std::to_string(count) + ", have " +
                                std::to_string(n_ - cursor_));
    std::uint64_t start = cursor_;
    cursor_ += count;
    if (count > 0) batches_.push_back({start, count, bits_each});
    return start;
}

void UserPool::seal_round() {
    if (mode_ != PoolMode::non_interactive)
        throw ProtocolViolation("only non-interactive pools seal a round");
    if (sealed_) throw ProtocolViolation("round already sealed");
    sealed_ = true;
}

std::uint32_t UserPool::bits_sent(std::uint64_t user) const {
    if (user >= cursor_) return 0;
    // Batches are disjoint and ordered by start; binary-search the one
    // containing this user.
    std::size_t lo = 0, hi = batches_.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        const BatchRecord& b = batches_[mid];
        if (user < b.start) {
            hi = mid;
        } else if (user >= b.start + b.count) {
            lo = mid + 1;
        } else {
            return b.bits_each;
        }
    }
    return 0;
}

std::uint64_t UserPool::rounds() const {
    if (mode_ == PoolMode::non_interactive) return sealed_ ? 1 : 0;
    return cursor_;
}

PoolAudit UserPool::audit() const {
    PoolAudit a;
    a.users_total = n_;
    a.users_consumed = cursor_;
    for (const BatchRecord& b : batches_) {
        a.total_bits += static_cast<std::uint64_t>(b.count) * b.bits_each;
        a.max_bits_per_user = std::max(a.max_bits_per_user, b.bits_each);
    }
    a.rounds = rounds();
    a.batches = batches_.size();
    return a;
}

UserPool pool_from_tree(const TreeModel& model, std::uint64_t n, Rng& rng, PoolMode mode) {
    if (n < 1) throw std::invalid_argument("pool needs at least one user");
    UserPool p;
    p.backend_ = UserPool::Backend::lazy_tree;
    p.mode_ = mode;
    p.n_ = n;
    p.seed_ = rng.u64();
    p.tree_.emplace(model);
    p.dim_ = model.d;
    return p;
}

UserPool pool_from_categorical(const CategoricalDistribution& dist, std::uint64_t n, Rng& rng,
                               PoolMode mode) {
    if (n < 1) throw std::invalid_argument("pool needs at least one user");
    dist.validate();
    UserPool p;
    p.backend_ = UserPool::Backend::lazy_categorical;
    p.mode_ = mode;
    p.n_ = n;
    p.seed_ = rng.u64();
    p.alias_.emplace(dist);
    p.support_k_ = static_cast<std::uint32_t>(dist.support());
    return p;
}

UserPool pool_from_samples(std::vector<std::vector<std::uint8_t>> samples, PoolMode mode) {
    if (samples.empty()) throw std::invalid_argument("pool needs at least one user");
    UserPool p;
    p.backend_ = UserPool::Backend::bit_samples;
    p.mode_ = mode;
    p.n_ = samples.size();
    p.dim_ = samples.front().size();
    if (p.dim_ == 0) throw std::invalid_argument("samples need at least one coordinate");
    for (const auto& s : samples) {
        if (s.size() != p.dim_) throw std::invalid_argument("ragged sample vectors");
        for (std::uint8_t bit : s)
            if (bit > 1) throw std::invalid_argument("sample coordinates must be bits");
    }
    p.samples_ = std::move(samples);
    return p;
}

UserPool pool_from_values(std::vector<std::uint32_t> values, std::uint32_t support,
                          PoolMode mode) {
    if (values.empty()) throw std::invalid_argument("pool needs at least one user");
    for (std::uint32_t v : values)
        if (v >= support) throw std::invalid_argument("value outside support");
    UserPool p;
    p.backend_ = UserPool::Backend::scalar_values;
    p.mode_ = mode;
    p.n_ = values.size();
    p.support_k_ = support;
    p.values_ = std::move(values);
    return p;
}

std::uint32_t pair_symbol(const UserPool& pool, std::uint64_t user, std::size_t i,
                          std::size_t j) {
    if (i == j) throw std::invalid_argument("pair indices must be distinct");
    std::size_t lo = std::min(i, j), hi = std::max(i, j);
    return static_cast<std::uint32_t>(pool.coordinate(user, lo)) |
           (static_cast<std::uint32_t>(pool.coordinate(user, hi)) << 1);
}

std::uint32_t triplet_symbol(const UserPool& pool, std::uint64_t user, std::size_t i,
                             std::size_t j, std::size_t k) {
    if (i == j || j == k || i == k) throw std::invalid_argument("triplet indices must be distinct");
    std::size_t s0 = i, s1 = j, s2 = k;
    if (s0 > s1) std::swap(s0, s1);
    if (s1 > s2) std::swap(s1, s2);
    if (s0 > s1) std::swap(s0, s1);
    return static_cast<std::uint32_t>(pool.coordinate(user, s0)) |
           (static_cast<std::uint32_t>(pool.coordinate(user, s1)) << 1) |
           (static_cast<std::uint32_t>(pool.coordinate(user, s2)) << 2);
}

std::uint32_t request_pair(UserPool& pool, std::size_t i, std::size_t j,
                           const PrivacyBudget& budget, Rng& rng) {
    std::uint64_t user = pool.take_users(1, 2);
    return static_cast<std::uint32_t>(
        k_randomized_response(pair_symbol(pool, user, i, j), 4, budget, rng));
}

std::uint32_t request_triplet(UserPool& pool, std::size_t i, std::size_t j, std::size_t k,
                              const PrivacyBudget& budget, Rng& rng) {
    std::uint64_t user = pool.take_users(1, 3);
    return static_cast<std::uint32_t>(
        k_randomized_response(triplet_symbol(pool, user, i, j, k), 8, budget, rng));
}

std::uint32_t request_hash(UserPool& pool, std::uint64_t q, const HashChannelParams& params,
                           Rng& rng) {
    std::uint64_t user = pool.take_users(1, params.b);
    return hash_response(params, q, pool.value(user), rng);
}

std::vector<std::uint64_t> request_marginal_batch(UserPool& pool, std::size_t i,
                                                  const PrivacyBudget& budget,
                                                  std::uint64_t count, Rng& rng) {
    std::uint64_t start = pool.take_users(count, 1);
    std::vector<std::uint64_t> hist(2, 0);
    for (std::uint64_t u = start; u < start + count; ++u)
        ++hist[k_randomized_response(pool.coordinate(u, i), 2, budget, rng)];
    return hist;
}

std::vector<std::uint64_t> request_pair_batch(UserPool& pool, std::size_t i, std::size_t j,
                                              const PrivacyBudget& budget, std::uint64_t count,
                                              Rng& rng) {
    std::uint64_t start = pool.take_users(count, 2);
    std::vector<std::uint64_t> hist(4, 0);
    for (std::uint64_t u = start; u < start + count; ++u)
        ++hist[k_randomized_response(pair_symbol(pool, u, i, j), 4, budget, rng)];
    return hist;
}

std::vector<std::uint64_t> request_triplet_batch(UserPool& pool, std::size_t i, std::size_t j,
                                                 std::size_t k, const PrivacyBudget& budget,
                                                 std::uint64_t count, Rng& rng) {
    std::uint64_t start = pool.take_users(count, 3);
    std::vector<std::uint64_t> hist(8, 0);
    for (std::uint64_t u = start; u < start + count; ++u)
        ++hist[k_randomized_response(triplet_symbol(pool, u, i, j, k), 8, budget, rng)];
    return hist;
}

}  // namespace ldpe
