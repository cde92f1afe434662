#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ldpe/distributions.hpp"
#include "ldpe/rng.hpp"

namespace ldpe {

// Privacy parameter alpha > 0. alpha = +infinity selects the identity
// (non-private) channel; it is accepted everywhere and flagged by
// verify_ldp_ratio rather than rejected.
struct PrivacyBudget {
    double alpha = 1.0;

    bool is_private() const { return std::isfinite(alpha); }

    // Throws std::invalid_argument unless alpha > 0.
    void validate() const;
};

// Keep probability of k-ary randomized response: e^a / (e^a + k - 1).
// Returns 1 for infinite alpha.
double krr_keep_probability(std::size_t k, double alpha);

// Probability that a specific *other* symbol is emitted: (1 - keep)/(k - 1).
double krr_leak_probability(std::size_t k, double alpha);

// k-ary randomized response: emits `value` with the keep probability, else a
// uniform draw over the other k-1 symbols. Throws std::invalid_argument for
// k < 2 or value out of range.
std::size_t k_randomized_response(std::size_t value, std::size_t k, const PrivacyBudget& budget,
                                  Rng& rng);

// Unbiased linear inversion of the randomized-response channel applied to the
// empirical frequencies of `reports` (a histogram over [k] with total >= 1),
// followed by clamping negatives to zero and renormalizing so the result is a
// valid distribution.
CategoricalDistribution rr_invert_frequencies(const std::vector<std::uint64_t>& reports,
                                              std::size_t k, const PrivacyBudget& budget);

// Parameters of the salted-hash + randomized-response channel: each user
// hashes its salted sample to b bits, keeps the hash with probability lambda,
// and otherwise sends a uniform b-bit value.
struct HashChannelParams {
    std::uint32_t b = 1;          // output width in bits, 1..32
    double lambda = 1.0;          // retention probability in (0, 1]; 1 = non-private
    std::uint64_t hash_seed = 0;  // shared keyed-hash seed (broadcast, not charged)

    // lambda = (e^a - 1)/(2^b + e^a - 1); infinite alpha gives lambda = 1.
    static HashChannelParams for_alpha(std::uint32_t b, double alpha, std::uint64_t hash_seed);

    void validate() const;

    std::uint64_t domain() const { return std::uint64_t{1} << b; }
};

// SipHash-2-4 with a 128-bit key (k0, k1); the keyed pseudo-random function
// behind the hash channel.
std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1, const std::uint8_t* data,
                        std::size_t len);

// Length-prefixed pair encoding of (salt q, sample bytes): little-endian
// u32 byte length, payload, for each component in order. The prefixes make
// the encoding injective, so distinct (q, x) never alias.
std::vector<std::uint8_t> encode_salted_message(std::uint64_t q, const std::uint8_t* x,
                                                std::size_t len);

// b-bit keyed hash of the salted sample, before randomization.
std::uint32_t salted_hash(const HashChannelParams& params, std::uint64_t q,
                          const std::uint8_t* x, std::size_t len);
std::uint32_t salted_hash(const HashChannelParams& params, std::uint64_t q, std::uint32_t sample);

// Full user-side response: salted hash, kept with probability lambda, else
// replaced by a uniform value over all 2^b outputs.
std::uint32_t hash_response(const HashChannelParams& params, std::uint64_t q,
                            const std::uint8_t* x, std::size_t len, Rng& rng);
std::uint32_t hash_response(const HashChannelParams& params, std::uint64_t q,
                            std::uint32_t sample, Rng& rng);

// Analytic channel matrix P(o | x): rows are inputs, columns outputs.
struct ChannelMatrix {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> p;  // p[x * outputs + o] = P(o | x)

    double at(std::size_t x, std::size_t o) const { return p[x * outputs + o]; }

    // Rows must be valid distributions (within 1e-12).
    void validate() const;
};

// Exact channel matrix of k-ary randomized response.
ChannelMatrix krr_channel(std::size_t k, double alpha);

// Exact channel matrix of the hash channel, one representative input per
// hash bucket (inputs hashing to the same bucket have identical rows, so
// this covers the worst case over the full input domain).
ChannelMatrix hash_channel(const HashChannelParams& params);

// Max over outputs o and input pairs (x, x') of P(o|x)/P(o|x').
// +infinity when some output has positive probability under one input and
// zero under another — the non-private flag.
double verify_ldp_ratio(const ChannelMatrix& channel);

}  // namespace ldpe
