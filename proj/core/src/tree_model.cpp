#include "ldpe/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ldpe {

namespace {

// Bernoulli entropy in bits.
double h2(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

struct Adjacency {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> nbr;  // (neighbor, edge index)

    explicit Adjacency(const TreeModel& m) : nbr(m.d) {
        for (std::size_t e = 0; e < m.edges.size(); ++e) {
            auto [i, j] = m.edges[e];
            nbr[i].emplace_back(j, e);
            nbr[j].emplace_back(i, e);
        }
    }
};

}  // namespace

std::array<double, 4> edge_cells(double p_i, double p_j, double r) {
    return {
        (1.0 - p_i) * (1.0 - p_j) + r,
        (1.0 - p_i) * p_j - r,
        p_i * (1.0 - p_j) - r,
        p_i * p_j + r,
    };
}

std::pair<double, double> coupling_bounds(double p_i, double p_j) {
    double lo = std::max(-(1.0 - p_i) * (1.0 - p_j), -p_i * p_j);
    double hi = std::min((1.0 - p_i) * p_j, p_i * (1.0 - p_j));
    return {lo, hi};
}

void TreeModel::validate() const {
    if (d < 1) throw std::invalid_argument("tree model needs d >= 1");
    if (edges.size() != d - 1)
        throw std::invalid_argument("a spanning tree on d nodes has d-1 edges");
    if (marginal_params.size() != d || couplings.size() != edges.size())
        throw std::invalid_argument("parameter vectors do not match d / edge count");
    for (double p : marginal_params)
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("marginal parameters must lie strictly in (0,1)");

    // Connectivity + acyclicity via union-find.
    std::vector<std::size_t> root(d);
    for (std::size_t i = 0; i < d; ++i) root[i] = i;
    auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (auto [i, j] : edges) {
        if (i >= d || j >= d || i == j) throw std::invalid_argument("bad edge endpoints");
        std::size_t a = find(i), b = find(j);
        if (a == b) throw std::invalid_argument("edge set contains a cycle");
        root[a] = b;
    }

    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto cells = edge_cells(marginal_params[edges[e].first],
                                marginal_params[edges[e].second], couplings[e]);
        for (double c : cells)
            if (!(c > 0.0 && c < 1.0))
                throw std::invalid_argument("edge " + std::to_string(e) +
                                            " has a cell probability outside (0,1)");
    }
}

JointTable edge_joint(const TreeModel& model, std::size_t edge_index) {
    auto [i, j] = model.edges.at(edge_index);
    auto cells = edge_cells(model.marginal_params[i], model.marginal_params[j],
                            model.couplings[edge_index]);
    JointTable t;
    t.dims = {2, 2};
    t.mass = {cells[0], cells[1], cells[2], cells[3]};
    return t;
}

double tree_true_entropy(const TreeModel& model) {
    double h = 0.0;
    for (double p : model.marginal_params) h += h2(p);
    for (std::size_t e = 0; e < model.edges.size(); ++e)
        h -= mutual_information(edge_joint(model, e));
    return h;
}

TreeModel random_tree_model(std::size_t d, Rng& rng) {
    if (d < 2) throw std::invalid_argument("random tree model needs d >= 2");

    // Weights of the complete graph, drawn in (i < j) lexicographic order.
    std::vector<double> w(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) w[i * d + j] = w[j * d + i] = rng.normal();

    // Maximum spanning tree (Prim, dense).
    std::vector<bool> in_tree(d, false);
    std::vector<double> best(d, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(d, 0);
    in_tree[0] = true;
    for (std::size_t v = 1; v < d; ++v) {
        best[v] = w[0 * d + v];
        parent[v] = 0;
    }
    TreeModel m;
    m.d = d;
    for (std::size_t step = 1; step < d; ++step) {
        std::size_t pick = d;
        double pick_w = -std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < d; ++v)
            if (!in_tree[v] && best[v] > pick_w) {
                pick = v;
                pick_w = best[v];
            }
        in_tree[pick] = true;
        m.edges.emplace_back(parent[pick], pick);
        for (std::size_t v = 0; v < d; ++v)
            if (!in_tree[v] && w[pick * d + v] > best[v]) {
                best[v] = w[pick * d + v];
                parent[v] = pick;
            }
    }

    m.marginal_params.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        double p;
        do {
            p = rng.uniform01();
        } while (p <= 0.0 || p >= 1.0);
        m.marginal_params[i] = p;
    }
    m.couplings.resize(m.edges.size());
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
        auto [lo, hi] = coupling_bounds(m.marginal_params[m.edges[e].first],
                                        m.marginal_params[m.edges[e].second]);
        m.couplings[e] = 0.99 * (lo + (hi - lo) * rng.uniform01());
    }
    return m;
}

TreeModel make_chain_model(const std::vector<std::size_t>& order, double p,
                           const std::vector<double>& couplings) {
    if (order.size() < 2 || couplings.size() != order.size() - 1)
        throw std::invalid_argument("chain needs >= 2 nodes and one coupling per link");
    TreeModel m;
    m.d = order.size();
    m.marginal_params.assign(m.d, p);
    for (std::size_t t = 0; t + 1 < order.size(); ++t) {
        m.edges.emplace_back(order[t], order[t + 1]);
        m.couplings.push_back(couplings[t]);
    }
    m.validate();
    return m;
}

TreeModel make_star_model(std::size_t d, std::size_t center, double p,
                          const std::vector<double>& couplings) {
    if (d < 2 || center >= d || couplings.size() != d - 1)
        throw std::invalid_argument("star needs d >= 2, a valid center, d-1 couplings");
    TreeModel m;
    m.d = d;
    m.marginal_params.assign(d, p);
    std::size_t e = 0;
    for (std::size_t v = 0; v < d; ++v) {
        if (v == center) continue;
        m.edges.emplace_back(center, v);
        m.couplings.push_back(couplings[e++]);
    }
    m.validate();
    return m;
}

double coupling_for_target_mi(double p, double target_bits) {
    auto [lo, hi] = coupling_bounds(p, p);
    (void)lo;
    double r_hi = 0.999 * hi;
    auto mi_at = [&](double r) {
        JointTable t;
        t.dims = {2, 2};
        auto cells = edge_cells(p, p, r);
        t.mass = {cells[0], cells[1], cells[2], cells[3]};
        return mutual_information(t);
    };
    if (target_bits <= 0.0) return 0.0;
    if (mi_at(r_hi) < target_bits)
        throw std::invalid_argument("target mutual information not reachable at these marginals");
    double a = 0.0, b = r_hi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        (mi_at(mid) < target_bits ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

CompiledTree::CompiledTree(const TreeModel& model) {
    const std::size_t d = model.d;
    Adjacency adj(model);
    order_.reserve(d);
    parent_.assign(d, 0);
    depth_.assign(d, 0);
    cond_.assign(d, {0.0, 0.0});

    std::vector<bool> seen(d, false);
    std::vector<std::size_t> queue;
    queue.push_back(0);
    seen[0] = true;
    root_p1_ = model.marginal_params[0];
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.erase(queue.begin());
        order_.push_back(v);
        for (auto [u, e] : adj.nbr[v]) {
            if (seen[u]) continue;
            seen[u] = true;
            parent_[u] = v;
            depth_[u] = depth_[v] + 1;
            // Conditional P(X_u = 1 | X_v) from the edge's cells, oriented so
            // the stored (first, second) order maps onto (v, u).
            auto [i, j] = model.edges[e];
            auto cells = edge_cells(model.marginal_params[i], model.marginal_params[j],
                                    model.couplings[e]);
            if (i == v) {
                // rows of cells are X_i = parent
                cond_[u][0] = cells[1] / (cells[0] + cells[1]);
                cond_[u][1] = cells[3] / (cells[2] + cells[3]);
            } else {
                // columns of cells are X_j = parent
                cond_[u][0] = cells[2] / (cells[0] + cells[2]);
                cond_[u][1] = cells[3] / (cells[1] + cells[3]);
            }
            // Guard degenerate hand-built models (zero-probability parent
            // value): any finite conditional works since the branch is never
            // taken under the model's own law.
            if (!std::isfinite(cond_[u][0])) cond_[u][0] = 0.0;
            if (!std::isfinite(cond_[u][1])) cond_[u][1] = 1.0;
            queue.push_back(u);
        }
    }
    if (order_.size() != d)
        throw std::invalid_argument("edges do not connect all nodes");
}

double CompiledTree::node_success(std::size_t v, std::uint8_t parent_value) const {
    return v == order_[0] && parent_[v] == v ? root_p1_ : cond_[v][parent_value];
}

std::uint8_t CompiledTree::coordinate(std::uint64_t seed, std::uint64_t user,
                                      std::size_t v) const {
    // Collect the root path, then evaluate top-down with the per-node uniforms.
    std::size_t chain[64];
    std::size_t len = 0;
    std::size_t cur = v;
    while (true) {
        if (len >= 64) throw std::runtime_error("tree deeper than supported");
        chain[len++] = cur;
        if (cur == 0) break;
        cur = parent_[cur];
    }
    std::uint8_t value = 0;
    for (std::size_t t = len; t-- > 0;) {
        std::size_t node = chain[t];
        double u = uniform01_at(seed, user, node);
        double p1 = node == 0 ? root_p1_ : cond_[node][value];
        value = u < p1 ? 1 : 0;
    }
    return value;
}

std::vector<std::uint8_t> CompiledTree::full_sample(std::uint64_t seed,
                                                    std::uint64_t user) const {
    std::vector<std::uint8_t> x(order_.size(), 0);
    for (std::size_t v : order_) {
        double u = uniform01_at(seed, user, v);
        double p1 = v == 0 ? root_p1_ : cond_[v][x[parent_[v]]];
        x[v] = u < p1 ? 1 : 0;
    }
    return x;
}

std::vector<std::uint8_t> CompiledTree::sample(Rng& rng) const {
    std::vector<std::uint8_t> x(order_.size(), 0);
    for (std::size_t v : order_) {
        double u = rng.uniform01();
        double p1 = v == 0 ? root_p1_ : cond_[v][x[parent_[v]]];
        x[v] = u < p1 ? 1 : 0;
    }
    return x;
}

std::vector<std::uint8_t> sample_full(const TreeModel& model, Rng& rng) {
    return CompiledTree(model).sample(rng);
}

std::vector<double> brute_force_joint(const TreeModel& model) {
    if (model.d > 20) throw std::invalid_argument("brute force joint limited to d <= 20");
    CompiledTree tree(model);

    const std::size_t d = model.d;
    const std::size_t n = std::size_t{1} << d;
    std::vector<double> joint(n, 0.0);

    // P(x) = P(root) * prod over non-root nodes of P(x_v | x_parent).
    // Reuse CompiledTree's conditionals by walking nodes in its BFS order.
    // We recompute per assignment; 2^d * d stays tiny for test-scale d.
    Adjacency adj(model);
    std::vector<std::size_t> parent(d, 0);
    std::vector<std::size_t> order;
    {
        std::vector<bool> seen(d, false);
        std::vector<std::size_t> queue{0};
        seen[0] = true;
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.erase(queue.begin());
            order.push_back(v);
            for (auto [u, e] : adj.nbr[v]) {
                (void)e;
                if (!seen[u]) {
                    seen[u] = true;
                    parent[u] = v;
                    queue.push_back(u);
                }
            }
        }
    }
    // Conditionals straight from edge tables.
    std::vector<std::array<std::array<double, 2>, 2>> cond(d);  // cond[v][pv][xv]
    for (std::size_t idx = 1; idx < order.size(); ++idx) {
        std::size_t v = order[idx];
        std::size_t pv = parent[v];
        // find the edge between v and pv
        for (std::size_t e = 0; e < model.edges.size(); ++e) {
            auto [i, j] = model.edges[e];
            if ((i == v && j == pv) || (i == pv && j == v)) {
                auto cells = edge_cells(model.marginal_params[i], model.marginal_params[j],
                                        model.couplings[e]);
                auto cell = [&](std::size_t xi, std::size_t xj) { return cells[xi * 2 + xj]; };
                for (std::size_t pval = 0; pval < 2; ++pval) {
                    double row0 = i == pv ? cell(pval, 0) : cell(0, pval);
                    double row1 = i == pv ? cell(pval, 1) : cell(1, pval);
                    double denom = row0 + row1;
                    cond[v][pval][0] = denom > 0 ? row0 / denom : 0.5;
                    cond[v][pval][1] = denom > 0 ? row1 / denom : 0.5;
                }
                break;
            }
        }
    }

    for (std::size_t a = 0; a < n; ++a) {
        auto bit = [&](std::size_t v) { return (a >> v) & 1u; };
        double p = bit(0) ? model.marginal_params[0] : 1.0 - model.marginal_params[0];
        for (std::size_t idx = 1; idx < order.size() && p > 0.0; ++idx) {
            std::size_t v = order[idx];
            p *= cond[v][bit(parent[v])][bit(v)];
        }
        joint[a] = p;
    }
    return joint;
}

JointTable exact_marginal(const TreeModel& model, const std::vector<std::size_t>& vars) {
    if (vars.empty() || vars.size() > 3)
        throw std::invalid_argument("exact_marginal supports 1 to 3 variables");
    auto joint = brute_force_joint(model);

    JointTable t;
    t.dims.assign(vars.size(), 2);
    t.mass.assign(std::size_t{1} << vars.size(), 0.0);
    for (std::size_t a = 0; a < joint.size(); ++a) {
        std::size_t flat = 0;
        for (std::size_t v : vars) flat = flat * 2 + ((a >> v) & 1u);
        t.mass[flat] += joint[a];
    }
    return t;
}

}  // namespace ldpe
