#include "ldpe/shannon_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ldpe/errors.hpp"

namespace ldpe {

std::uint64_t sample_threshold(Rng& rng) {
    double u = rng.uniform_open01();
    return static_cast<std::uint64_t>(1.0 / u);
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

EstimateReport estimate_tree_entropy_with_hooks(const TreeEstimatorHooks& hooks, std::size_t d,
                                                const TreeEstimatorConfig& cfg, Rng& rng,
                                                MstEstimatorState* state_out) {
    if (d < 2) throw std::invalid_argument("tree entropy estimation needs d >= 2");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 0.5))
        throw InvalidEpsilon("accuracy target must lie in (0, 1/2]");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw std::invalid_argument("delta must lie in (0, 1)");
    if (cfg.support < 2) throw std::invalid_argument("variable support must be at least 2");

    const double eps = cfg.epsilon;
    const double log2c = std::log2(static_cast<double>(cfg.support));

    MstEstimatorState st;
    st.M = static_cast<std::uint64_t>(std::ceil(2.0 * log2c / eps));
    st.R = static_cast<std::uint64_t>(std::ceil(std::log(1.0 / cfg.delta) / (eps * eps)));
    st.eta_hat.assign(st.M, 0.0);

    const std::uint64_t scan_cap = static_cast<std::uint64_t>(std::ceil(2.0 / eps));

    auto cached_mi = [&](std::size_t a, std::size_t b) {
        auto key = std::minmax(a, b);
        auto it = st.edge_cache.find(key);
        if (it != st.edge_cache.end()) return it->second;
        double est = hooks.mi(key.first, key.second);
        st.edge_cache.emplace(key, est);
        return est;
    };

    std::vector<char> discovered(d, 0);
    std::vector<std::size_t> queue;

    for (std::uint64_t m = 1; m <= st.M; ++m) {
        const double tau = eps * static_cast<double>(m);
        std::uint64_t gamma_sum = 0;
        for (std::uint64_t r = 0; r < st.R; ++r) {
            std::size_t start = static_cast<std::size_t>(rng.uniform_int(d));
            std::uint64_t z = sample_threshold(rng);
            std::uint64_t cap = std::min<std::uint64_t>(scan_cap, z);

            if (cfg.threshold_shortcut && tau > log2c) {
                // No estimate of a c x c pairwise table reaches this
                // threshold, so the start node is always isolated here:
                // component size 1, within any cap.
                ++gamma_sum;
                continue;
            }

            // Breadth-first search of the start node's component in the
            // graph of pairs with estimate >= tau, aborted as soon as the
            // component provably exceeds the cap.
            std::fill(discovered.begin(), discovered.end(), 0);
            queue.clear();
            discovered[start] = 1;
            queue.push_back(start);
            std::uint64_t found = 1;
            bool whole_component = true;
            for (std::size_t head = 0; head < queue.size() && whole_component; ++head) {
                std::size_t v = queue[head];
                for (std::size_t j = 0; j < d; ++j) {
                    if (discovered[j]) continue;
                    if (cached_mi(v, j) < tau) continue;
                    if (found + 1 > cap) {
                        whole_component = false;
                        break;
                    }
                    discovered[j] = 1;
                    ++found;
                    queue.push_back(j);
                }
            }
            if (whole_component) ++gamma_sum;
        }
        st.eta_hat[m - 1] =
            static_cast<double>(d) * static_cast<double>(gamma_sum) / static_cast<double>(st.R);
    }

    double eta_total = 0.0;
    for (double e : st.eta_hat) eta_total += e;
    st.W_hat = eps * static_cast<double>(st.M) * static_cast<double>(d) - eps * eta_total;

    st.S_hat = 0.0;
    for (std::size_t i = 0; i < d; ++i) st.S_hat += hooks.marginal_entropy(i);
    st.H_hat = st.S_hat - st.W_hat;

    EstimateReport report;
    report.value = st.H_hat;
    report.extras["W_hat"] = st.W_hat;
    report.extras["S_hat"] = st.S_hat;
    report.extras["pairs_estimated"] = static_cast<double>(st.edge_cache.size());
    report.extras["levels"] = static_cast<double>(st.M);
    report.extras["repetitions"] = static_cast<double>(st.R);
    report.series["eta_hat"] = st.eta_hat;

    if (state_out) *state_out = std::move(st);
    return report;
}

EstimateReport estimate_tree_entropy(UserPool& pool, std::size_t d,
                                     const TreeEstimatorConfig& cfg, Rng& rng,
                                     MstEstimatorState* state_out) {
    const double dd = static_cast<double>(d);
    const std::uint32_t pair_support = cfg.support * cfg.support;
    const GoodEstimateSpec mi_spec = GoodEstimateSpec::make(
        cfg.alpha, cfg.epsilon / 2.0, cfg.delta / (dd * dd), pair_support, cfg.sample_constant);
    const GoodEstimateSpec marginal_spec = GoodEstimateSpec::make(
        cfg.alpha, cfg.epsilon, cfg.delta / dd, cfg.support, cfg.sample_constant);

    TreeEstimatorHooks hooks;
    hooks.mi = [&](std::size_t i, std::size_t j) {
        return good_mi_estimate(pool, i, j, mi_spec, rng);
    };
    hooks.marginal_entropy = [&](std::size_t i) {
        return good_entropy_estimate(pool, {i}, marginal_spec, rng);
    };

    EstimateReport report = estimate_tree_entropy_with_hooks(hooks, d, cfg, rng, state_out);
    PoolAudit a = pool.audit();
    report.users_consumed = a.users_consumed;
    report.max_bits_per_user = a.max_bits_per_user;
    report.rounds = a.rounds;
    return report;
}

std::pair<double, double> mst_weight_identity_check(
    const std::vector<std::vector<std::uint32_t>>& weight_levels, double epsilon,
    std::uint64_t M) {
    const std::size_t d = weight_levels.size();
    if (d < 2) throw std::invalid_argument("need at least two nodes");
    for (const auto& row : weight_levels)
        if (row.size() != d) throw std::invalid_argument("weight matrix must be square");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            if (weight_levels[i][j] != weight_levels[j][i])
                throw std::invalid_argument("weight matrix must be symmetric");
            if (weight_levels[i][j] > M)
                throw std::invalid_argument("weight level above M");
        }

    // Connectivity over present edges (level >= 1).
    {
        UnionFind uf(d);
        std::size_t components = d;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                if (weight_levels[i][j] >= 1 && uf.unite(i, j)) --components;
        if (components != 1) throw std::invalid_argument("graph is disconnected");
    }

    // Maximum spanning tree by Kruskal on descending levels.
    std::uint64_t mst_levels = 0;
    {
        std::vector<std::pair<std::uint32_t, std::pair<std::size_t, std::size_t>>> edges;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                if (weight_levels[i][j] >= 1) edges.push_back({weight_levels[i][j], {i, j}});
        std::stable_sort(edges.begin(), edges.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        UnionFind uf(d);
        for (const auto& [lvl, e] : edges)
            if (uf.unite(e.first, e.second)) mst_levels += lvl;
    }

    // Component counts of every threshold subgraph.
    std::uint64_t eta_total = 0;
    for (std::uint64_t m = 1; m <= M; ++m) {
        UnionFind uf(d);
        std::uint64_t components = d;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                if (weight_levels[i][j] >= m && uf.unite(i, j)) --components;
        eta_total += components;
    }

    double lhs = epsilon * static_cast<double>(mst_levels);
    double rhs = epsilon * static_cast<double>(M * d - eta_total);
    return {lhs, rhs};
}

}  // namespace ldpe
