#include "ldpe/shannon_chain_star.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ldpe/errors.hpp"

namespace ldpe {

EstimatorHooks exact_hooks(const TreeModel& model) {
    EstimatorHooks h;
    h.cmi = [model](std::size_t i, std::size_t j, std::size_t k, double) {
        return conditional_mutual_information(exact_marginal(model, {i, j, k}));
    };
    h.mi = [model](std::size_t i, std::size_t j, double) {
        return mutual_information(exact_marginal(model, {i, j}));
    };
    h.entropy = [model](std::size_t i, double) {
        return shannon_entropy(exact_marginal(model, {i}).flatten());
    };
    return h;
}

EstimatorHooks pool_hooks(UserPool& pool, const CmiTestConfig& cfg, Rng& rng) {
    EstimatorHooks h;
    h.cmi = [&pool, cfg, &rng](std::size_t i, std::size_t j, std::size_t k, double delta) {
        return good_cmi_estimate(
            pool, i, j, k,
            GoodEstimateSpec::make(cfg.alpha, cfg.epsilon, delta, 8, cfg.sample_constant), rng);
    };
    h.mi = [&pool, cfg, &rng](std::size_t i, std::size_t j, double delta) {
        return good_mi_estimate(
            pool, i, j,
            GoodEstimateSpec::make(cfg.alpha, cfg.epsilon, delta, 4, cfg.sample_constant), rng);
    };
    h.entropy = [&pool, cfg, &rng](std::size_t i, double delta) {
        return good_entropy_estimate(
            pool, {i},
            GoodEstimateSpec::make(cfg.alpha, cfg.epsilon, delta, 2, cfg.sample_constant), rng);
    };
    return h;
}

bool cmi_exceeds(const EstimatorHooks& hooks, std::size_t i, std::size_t j, std::size_t k,
                 double epsilon, double delta_prime, std::uint64_t* test_counter) {
    if (i == j || j == k || i == k) throw std::invalid_argument("indices must be distinct");
    if (test_counter) ++*test_counter;
    return hooks.cmi(i, j, k, delta_prime) > epsilon;
}

bool cmi_exceeds(UserPool& pool, std::size_t i, std::size_t j, std::size_t k,
                 const CmiTestConfig& cfg, double delta_prime, Rng& rng) {
    return cmi_exceeds(pool_hooks(pool, cfg, rng), i, j, k, cfg.epsilon, delta_prime);
}

std::size_t ternary_search(const std::vector<std::size_t>& order, std::size_t lo, std::size_t hi,
                           std::size_t j, const EstimatorHooks& hooks, double epsilon,
                           double delta_prime, std::uint64_t* test_counter) {
    if (lo >= hi || hi >= order.size()) throw std::invalid_argument("bad search interval");
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi + 1) / 2;
        // Conditioning on X_j separates order[lo] from order[mid] exactly
        // when j lies between them.
        if (cmi_exceeds(hooks, order[lo], order[mid], j, epsilon, delta_prime, test_counter)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

ChainRecovery recover_chain_order(std::size_t d, const EstimatorHooks& hooks, double epsilon,
                                  double delta_per_test) {
    if (d < 3) throw std::invalid_argument("chain recovery needs d >= 3");

    ChainRecovery rec;

    // Seed from (0, 1, 2): the member whose conditioning yields the smallest
    // dependence estimate separates the other two, so it is the middle.
    double cond_on_2 = hooks.cmi(0, 1, 2, delta_per_test);
    double cond_on_1 = hooks.cmi(0, 2, 1, delta_per_test);
    double cond_on_0 = hooks.cmi(1, 2, 0, delta_per_test);
    rec.cmi_tests += 3;

    double strongest = std::max({cond_on_0, cond_on_1, cond_on_2});
    if (strongest <= epsilon)
        throw ChainAssumptionViolated("no dependence above threshold among the seed triplet");

    std::size_t middle;
    if (cond_on_0 <= cond_on_1 && cond_on_0 <= cond_on_2) {
        middle = 0;
    } else if (cond_on_1 <= cond_on_2) {
        middle = 1;
    } else {
        middle = 2;
    }
    std::size_t end_a = middle == 0 ? 1 : 0;
    std::size_t end_b = middle == 2 ? 1 : 2;
    rec.order = {std::min(end_a, end_b), middle, std::max(end_a, end_b)};

    for (std::size_t j = 3; j < d; ++j) {
        std::size_t head = rec.order.front();
        std::size_t tail = rec.order.back();

        // Head (resp. tail) separating j from the far end means j hangs
        // beyond that end.
        double at_head = hooks.cmi(j, tail, head, delta_per_test);
        double at_tail = hooks.cmi(head, j, tail, delta_per_test);
        rec.cmi_tests += 2;

        if (at_head <= epsilon && at_tail <= epsilon) {
            if (at_head <= at_tail) {
                rec.order.insert(rec.order.begin(), j);
            } else {
                rec.order.push_back(j);
            }
        } else if (at_head <= epsilon) {
            rec.order.insert(rec.order.begin(), j);
        } else if (at_tail <= epsilon) {
            rec.order.push_back(j);
        } else {
            std::size_t pos = ternary_search(rec.order, 0, rec.order.size() - 1, j, hooks,
                                             epsilon, delta_per_test, &rec.cmi_tests);
            rec.order.insert(rec.order.begin() + static_cast<std::ptrdiff_t>(pos) + 1, j);
        }
    }
    return rec;
}

StarRecovery recover_star_center(std::size_t d, std::size_t probe, const EstimatorHooks& hooks,
                                 double delta_per_estimate) {
    if (d < 3) throw std::invalid_argument("star recovery needs d >= 3");
    if (probe >= d) throw std::invalid_argument("probe out of range");

    StarRecovery rec;
    rec.probe = probe;

    double best = -1.0;
    std::size_t rival = probe;
    double probe_sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        if (j == probe) continue;
        double est = hooks.mi(probe, j, delta_per_estimate);
        ++rec.mi_estimates;
        probe_sum += est;
        if (est > best) {
            best = est;
            rival = j;
        }
    }
    rec.rival = rival;

    double rival_sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        if (j == rival) continue;
        rival_sum += hooks.mi(rival, j, delta_per_estimate);
        ++rec.mi_estimates;
    }

    rec.probe_sum = probe_sum;
    rec.rival_sum = rival_sum;
    rec.center = probe_sum > rival_sum ? probe : rival;
    return rec;
}

namespace {

// Tree plug-in on a recovered structure: marginal entropies minus the
// mutual information of every recovered edge, all freshly estimated.
double structure_plugin(std::size_t d, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                        const EstimatorHooks& hooks, double delta_per_term) {
    double h = 0.0;
    for (std::size_t i = 0; i < d; ++i) h += hooks.entropy(i, delta_per_term);
    for (const auto& [a, b] : edges) h -= hooks.mi(a, b, delta_per_term);
    return h;
}

}  // namespace

EstimateReport estimate_chain_entropy(UserPool& pool, std::size_t d, const CmiTestConfig& cfg,
                                      Rng& rng) {
    if (d < 3) throw std::invalid_argument("chain estimation needs d >= 3");
    EstimatorHooks hooks = pool_hooks(pool, cfg, rng);

    const double dd = static_cast<double>(d);
    const double delta_test = cfg.delta / (3.0 * dd * std::log2(dd));
    ChainRecovery rec = recover_chain_order(d, hooks, cfg.epsilon, delta_test);

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t t = 0; t + 1 < rec.order.size(); ++t)
        edges.emplace_back(rec.order[t], rec.order[t + 1]);
    const double delta_term = cfg.delta / (2.0 * dd);
    double h = structure_plugin(d, edges, hooks, delta_term);

    EstimateReport report;
    report.value = h;
    report.extras["cmi_tests"] = static_cast<double>(rec.cmi_tests);
    report.series["recovered_order"].assign(rec.order.begin(), rec.order.end());
    PoolAudit a = pool.audit();
    report.users_consumed = a.users_consumed;
    report.max_bits_per_user = a.max_bits_per_user;
    report.rounds = a.rounds;
    return report;
}

EstimateReport estimate_star_entropy(UserPool& pool, std::size_t d, const CmiTestConfig& cfg,
                                     Rng& rng) {
    if (d < 3) throw std::invalid_argument("star estimation needs d >= 3");
    EstimatorHooks hooks = pool_hooks(pool, cfg, rng);

    const double delta_each = cfg.delta / (6.0 * static_cast<double>(d));
    std::size_t probe = static_cast<std::size_t>(rng.uniform_int(d));
    StarRecovery rec = recover_star_center(d, probe, hooks, delta_each);

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t j = 0; j < d; ++j)
        if (j != rec.center) edges.emplace_back(rec.center, j);
    double h = structure_plugin(d, edges, hooks, delta_each);

    EstimateReport report;
    report.value = h;
    report.extras["center"] = static_cast<double>(rec.center);
    report.extras["probe"] = static_cast<double>(rec.probe);
    report.extras["rival"] = static_cast<double>(rec.rival);
    report.extras["probe_sum"] = rec.probe_sum;
    report.extras["rival_sum"] = rec.rival_sum;
    report.extras["mi_estimates"] = static_cast<double>(rec.mi_estimates);
    PoolAudit a = pool.audit();
    report.users_consumed = a.users_consumed;
    report.max_bits_per_user = a.max_bits_per_user;
    report.rounds = a.rounds;
    return report;
}

}  // namespace ldpe
