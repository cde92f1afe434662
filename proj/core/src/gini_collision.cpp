#include "ldpe/gini_collision.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ldpe/errors.hpp"
#include "ldpe/ldp.hpp"

namespace ldpe {

PairingPlan PairingPlan::consecutive(std::uint64_t n) {
    PairingPlan plan;
    const std::uint64_t m = n / 2;
    plan.pairs.reserve(m);
    plan.q.resize(n);
    for (std::uint64_t t = 0; t < m; ++t) {
        plan.pairs.emplace_back(2 * t, 2 * t + 1);
        plan.q[2 * t] = t;
        plan.q[2 * t + 1] = t;
    }
    if (n % 2 == 1) plan.q[n - 1] = m;  // unique salt for the dropped user
    return plan;
}

double invert_collision_rate(double c_bar, std::uint32_t b, double lambda) {
    if (b < 1 || b > 32) throw std::invalid_argument("hash width must be 1..32");
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("retention probability must be in (0, 1]");
    const double domain = std::ldexp(1.0, static_cast<int>(b));  // 2^b
    return (domain * c_bar - 1.0) / (lambda * lambda * (domain - 1.0));
}

double bias_correction_roundtrip(double g_bar, std::uint32_t b, double lambda) {
    const double inv_domain = std::ldexp(1.0, -static_cast<int>(b));  // 2^-b
    const double c_bar = lambda * lambda * (1.0 - inv_domain) * g_bar + inv_domain;
    return invert_collision_rate(c_bar, b, lambda);
}

EstimateReport run_gini_collision(UserPool& pool, std::uint32_t b, double alpha,
                                  std::uint64_t hash_seed, Rng& rng) {
    if (pool.mode() != PoolMode::non_interactive)
        throw ProtocolViolation("pairwise-hash estimator needs a non-interactive pool");
    HashChannelParams params = HashChannelParams::for_alpha(b, alpha, hash_seed);
    params.validate();

    const std::uint64_t n = pool.remaining();
    if (n < 2) throw InsufficientUsers("pairwise-hash estimator needs at least 2 users");

    const PairingPlan plan = PairingPlan::consecutive(n);
    const std::uint64_t m = plan.pairs.size();
    const std::uint64_t start = pool.take_users(2 * m, b);
    pool.seal_round();

    CollisionTally tally;
    tally.m = m;
    for (std::uint64_t t = 0; t < m; ++t) {
        const std::uint64_t q = plan.q[plan.pairs[t].first];
        const std::uint32_t r0 =
            hash_response(params, q, pool.value(start + plan.pairs[t].first), rng);
        const std::uint32_t r1 =
            hash_response(params, q, pool.value(start + plan.pairs[t].second), rng);
        if (r0 == r1) ++tally.collisions;
    }
    tally.c_bar = static_cast<double>(tally.collisions) / static_cast<double>(tally.m);

    const double cph = invert_collision_rate(tally.c_bar, b, params.lambda);
    bool saturated = false;
    double c_hat;
    if (cph <= 0.0) {
        c_hat = std::numeric_limits<double>::infinity();
        saturated = true;
    } else if (cph > 1.0) {
        c_hat = 0.0;
        saturated = true;
    } else {
        c_hat = -std::log2(cph);
    }

    const PoolAudit audit = pool.audit();
    EstimateReport report;
    report.value = c_hat;
    report.users_consumed = audit.users_consumed;
    report.max_bits_per_user = audit.max_bits_per_user;
    report.rounds = audit.rounds;
    report.seed = pool.sample_seed();
    report.extras["lambda"] = params.lambda;
    report.extras["pairs"] = static_cast<double>(tally.m);
    report.extras["c_bar"] = tally.c_bar;
    report.extras["collision_prob_hat"] = cph;
    report.extras["gini_hat"] = 1.0 - cph;
    report.extras["saturated"] = saturated ? 1.0 : 0.0;
    return report;
}

EstimateReport skorski_baseline(UserPool& pool, std::uint32_t support) {
    if (support < 2) throw std::invalid_argument("support must be at least 2");
    const std::uint64_t n = pool.remaining();
    if (n < 2) throw InsufficientUsers("collision baseline needs at least 2 users");

    std::uint32_t bits = 0;
    while ((std::uint64_t{1} << bits) < support) ++bits;  // ceil(log2 support)

    const std::uint64_t m = n / 2;
    const std::uint64_t start = pool.take_users(2 * m, bits);
    if (pool.mode() == PoolMode::non_interactive) pool.seal_round();

    CollisionTally tally;
    tally.m = m;
    for (std::uint64_t t = 0; t < m; ++t) {
        if (pool.value(start + 2 * t) == pool.value(start + 2 * t + 1)) ++tally.collisions;
    }
    tally.c_bar = static_cast<double>(tally.collisions) / static_cast<double>(tally.m);

    const PoolAudit audit = pool.audit();
    EstimateReport report;
    report.users_consumed = audit.users_consumed;
    report.max_bits_per_user = audit.max_bits_per_user;
    report.rounds = audit.rounds;
    report.seed = pool.sample_seed();
    report.extras["pairs"] = static_cast<double>(tally.m);
    report.extras["c_bar"] = tally.c_bar;
    if (tally.collisions == 0) {
        report.value = std::numeric_limits<double>::infinity();
        report.extras["saturated"] = 1.0;
    } else {
        report.value = -std::log2(tally.c_bar);
        report.extras["saturated"] = 0.0;
    }
    return report;
}

}  // namespace ldpe
