#include "ldpe/ldp.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace ldpe {

void PrivacyBudget::validate() const {
    if (std::isnan(alpha) || alpha <= 0.0)
        throw std::invalid_argument("privacy parameter must be positive");
}

double krr_keep_probability(std::size_t k, double alpha) {
    if (k < 2) throw std::invalid_argument("randomized response needs k >= 2");
    if (!std::isfinite(alpha)) return 1.0;
    double ea = std::exp(alpha);
    if (!std::isfinite(ea)) return 1.0;
    return ea / (ea + static_cast<double>(k) - 1.0);
}

double krr_leak_probability(std::size_t k, double alpha) {
    return (1.0 - krr_keep_probability(k, alpha)) / (static_cast<double>(k) - 1.0);
}

std::size_t k_randomized_response(std::size_t value, std::size_t k, const PrivacyBudget& budget,
                                  Rng& rng) {
    if (k < 2) throw std::invalid_argument("randomized response needs k >= 2");
    if (value >= k) throw std::invalid_argument("value out of range");
    budget.validate();
    double keep = krr_keep_probability(k, budget.alpha);
    if (rng.uniform01() < keep) return value;
    std::size_t other = rng.uniform_int(k - 1);
    return other >= value ? other + 1 : other;
}

CategoricalDistribution rr_invert_frequencies(const std::vector<std::uint64_t>& reports,
                                              std::size_t k, const PrivacyBudget& budget) {
    if (k < 2 || reports.size() != k)
        throw std::invalid_argument("histogram must cover [k] with k >= 2");
    budget.validate();
    std::uint64_t n = 0;
    for (std::uint64_t c : reports) n += c;
    if (n == 0) throw std::invalid_argument("histogram is empty");

    double keep = krr_keep_probability(k, budget.alpha);
    double leak = krr_leak_probability(k, budget.alpha);
    double gap = keep - leak;  // > 0 for any positive alpha

    CategoricalDistribution out;
    out.probs.resize(k);
    double total = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        double f = static_cast<double>(reports[s]) / static_cast<double>(n);
        double p = (f - leak) / gap;
        if (p < 0.0) p = 0.0;
        out.probs[s] = p;
        total += p;
    }
    // total > 0 always: the raw inversions sum to exactly 1, so clamping
    // cannot remove all mass.
    for (double& p : out.probs) p /= total;
    return out;
}

HashChannelParams HashChannelParams::for_alpha(std::uint32_t b, double alpha,
                                               std::uint64_t hash_seed) {
    if (b < 1 || b > 32) throw std::invalid_argument("hash width must be 1..32 bits");
    if (std::isnan(alpha) || alpha <= 0.0)
        throw std::invalid_argument("privacy parameter must be positive");
    HashChannelParams p;
    p.b = b;
    p.hash_seed = hash_seed;
    double ea = std::exp(alpha);
    if (!std::isfinite(ea)) {
        p.lambda = 1.0;
    } else {
        p.lambda = (ea - 1.0) / (static_cast<double>(p.domain()) + ea - 1.0);
    }
    return p;
}

void HashChannelParams::validate() const {
    if (b < 1 || b > 32) throw std::invalid_argument("hash width must be 1..32 bits");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("retention probability must lie in (0, 1]");
}

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

inline std::uint64_t load64_le(const std::uint8_t* p) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    v = __builtin_bswap64(v);
#endif
    return v;
}

inline void store32_le(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
    p[2] = static_cast<std::uint8_t>(v >> 16);
    p[3] = static_cast<std::uint8_t>(v >> 24);
}

inline void store64_le(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1, const std::uint8_t* data,
                        std::size_t len) {
    std::uint64_t v0 = 0x736f6d6570736575ULL ^ k0;
    std::uint64_t v1 = 0x646f72616e646f6dULL ^ k1;
    std::uint64_t v2 = 0x6c7967656e657261ULL ^ k0;
    std::uint64_t v3 = 0x7465646279746573ULL ^ k1;

    auto round = [&]() {
        v0 += v1;
        v1 = rotl64(v1, 13);
        v1 ^= v0;
        v0 = rotl64(v0, 32);
        v2 += v3;
        v3 = rotl64(v3, 16);
        v3 ^= v2;
        v0 += v3;
        v3 = rotl64(v3, 21);
        v3 ^= v0;
        v2 += v1;
        v1 = rotl64(v1, 17);
        v1 ^= v2;
        v2 = rotl64(v2, 32);
    };

    const std::uint8_t* end = data + (len - (len % 8));
    for (const std::uint8_t* p = data; p != end; p += 8) {
        std::uint64_t m = load64_le(p);
        v3 ^= m;
        round();
        round();
        v0 ^= m;
    }

    std::uint64_t tail = static_cast<std::uint64_t>(len & 0xff) << 56;
    switch (len % 8) {
        case 7: tail |= static_cast<std::uint64_t>(end[6]) << 48; [[fallthrough]];
        case 6: tail |= static_cast<std::uint64_t>(end[5]) << 40; [[fallthrough]];
        case 5: tail |= static_cast<std::uint64_t>(end[4]) << 32; [[fallthrough]];
        case 4: tail |= static_cast<std::uint64_t>(end[3]) << 24; [[fallthrough]];
        case 3: tail |= static_cast<std::uint64_t>(end[2]) << 16; [[fallthrough]];
        case 2: tail |= static_cast<std::uint64_t>(end[1]) << 8; [[fallthrough]];
        case 1: tail |= static_cast<std::uint64_t>(end[0]); break;
        default: break;
    }
    v3 ^= tail;
    round();
    round();
    v0 ^= tail;

    v2 ^= 0xff;
    round();
    round();
    round();
    round();
    return v0 ^ v1 ^ v2 ^ v3;
}

std::vector<std::uint8_t> encode_salted_message(std::uint64_t q, const std::uint8_t* x,
                                                std::size_t len) {
    std::vector<std::uint8_t> out(4 + 8 + 4 + len);
    store32_le(out.data(), 8);
    store64_le(out.data() + 4, q);
    store32_le(out.data() + 12, static_cast<std::uint32_t>(len));
    if (len) std::memcpy(out.data() + 16, x, len);
    return out;
}

namespace {

inline std::uint32_t truncate_hash(std::uint64_t h, std::uint32_t b) {
    if (b >= 32) return static_cast<std::uint32_t>(h);
    return static_cast<std::uint32_t>(h & ((std::uint64_t{1} << b) - 1));
}

}  // namespace

std::uint32_t salted_hash(const HashChannelParams& params, std::uint64_t q,
                          const std::uint8_t* x, std::size_t len) {
    auto msg = encode_salted_message(q, x, len);
    std::uint64_t h = siphash24(derive(params.hash_seed, 0), derive(params.hash_seed, 1),
                                msg.data(), msg.size());
    return truncate_hash(h, params.b);
}

std::uint32_t salted_hash(const HashChannelParams& params, std::uint64_t q,
                          std::uint32_t sample) {
    // Same encoding as the byte-string overload with the sample as 4 LE
    // bytes, built on the stack: this is the per-user hot path.
    std::array<std::uint8_t, 20> msg;
    store32_le(msg.data(), 8);
    store64_le(msg.data() + 4, q);
    store32_le(msg.data() + 12, 4);
    store32_le(msg.data() + 16, sample);
    std::uint64_t h = siphash24(derive(params.hash_seed, 0), derive(params.hash_seed, 1),
                                msg.data(), msg.size());
    return truncate_hash(h, params.b);
}

std::uint32_t hash_response(const HashChannelParams& params, std::uint64_t q,
                            const std::uint8_t* x, std::size_t len, Rng& rng) {
    std::uint32_t v = salted_hash(params, q, x, len);
    if (rng.uniform01() < params.lambda) return v;
    return static_cast<std::uint32_t>(rng.uniform_int(params.domain()));
}

std::uint32_t hash_response(const HashChannelParams& params, std::uint64_t q,
                            std::uint32_t sample, Rng& rng) {
    std::uint32_t v = salted_hash(params, q, sample);
    if (rng.uniform01() < params.lambda) return v;
    return static_cast<std::uint32_t>(rng.uniform_int(params.domain()));
}

void ChannelMatrix::validate() const {
    if (inputs == 0 || outputs == 0 || p.size() != inputs * outputs)
        throw std::invalid_argument("channel matrix shape mismatch");
    for (std::size_t x = 0; x < inputs; ++x) {
        double row = 0.0;
        for (std::size_t o = 0; o < outputs; ++o) {
            double v = at(x, o);
            if (v < 0.0) throw std::invalid_argument("negative channel probability");
            row += v;
        }
        if (std::abs(row - 1.0) > 1e-12)
            throw std::invalid_argument("channel row does not sum to 1");
    }
}

ChannelMatrix krr_channel(std::size_t k, double alpha) {
    if (k < 2) throw std::invalid_argument("randomized response needs k >= 2");
    double keep = krr_keep_probability(k, alpha);
    double leak = krr_leak_probability(k, alpha);
    ChannelMatrix m;
    m.inputs = m.outputs = k;
    m.p.assign(k * k, leak);
    for (std::size_t x = 0; x < k; ++x) m.p[x * k + x] = keep;
    return m;
}

ChannelMatrix hash_channel(const HashChannelParams& params) {
    params.validate();
    std::size_t n = static_cast<std::size_t>(params.domain());
    double background = (1.0 - params.lambda) / static_cast<double>(n);
    ChannelMatrix m;
    m.inputs = m.outputs = n;
    m.p.assign(n * n, background);
    for (std::size_t x = 0; x < n; ++x) m.p[x * n + x] = params.lambda + background;
    return m;
}

double verify_ldp_ratio(const ChannelMatrix& channel) {
    channel.validate();
    double worst = 1.0;
    for (std::size_t o = 0; o < channel.outputs; ++o) {
        double pmax = 0.0;
        double pmin = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < channel.inputs; ++x) {
            double v = channel.at(x, o);
            pmax = std::max(pmax, v);
            pmin = std::min(pmin, v);
        }
        if (pmax == 0.0) continue;  // output never emitted
        if (pmin == 0.0) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, pmax / pmin);
    }
    return worst;
}

}  // namespace ldpe
