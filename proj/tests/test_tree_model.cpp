#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ldpe/distributions.hpp"
#include "ldpe/rng.hpp"
#include "ldpe/tree_model.hpp"

using namespace ldpe;

namespace {

double h2(double p) { return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p); }

double entropy_of(const std::vector<double>& mass) {
    double h = 0.0;
    for (double p : mass)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

// d perfectly correlated fair coins: a chain with p = 1/2 and coupling 1/4
// at every edge. Two of the four pairwise cells are exactly zero, so this
// fixture is built directly rather than through validate().
TreeModel copy_instance(std::size_t d) {
    TreeModel m;
    m.d = d;
    for (std::size_t i = 0; i + 1 < d; ++i) m.edges.emplace_back(i, i + 1);
    m.marginal_params.assign(d, 0.5);
    m.couplings.assign(d - 1, 0.25);
    return m;
}

}  // namespace

TEST_CASE("edge cells preserve both marginals for any coupling") {
    Rng rng(20);
    for (int t = 0; t < 50; ++t) {
        const double pi = rng.uniform_open01() * 0.98 + 0.01;
        const double pj = rng.uniform_open01() * 0.98 + 0.01;
        const auto [lo, hi] = coupling_bounds(pi, pj);
        const double r = lo + (hi - lo) * rng.uniform01();
        const auto cells = edge_cells(pi, pj, r);
        CHECK_EQ(cells[0] + cells[1] + cells[2] + cells[3],
                 doctest::Approx(1.0).epsilon(1e-12));
        CHECK_EQ(cells[2] + cells[3], doctest::Approx(pi).epsilon(1e-12));  // P(X_i = 1)
        CHECK_EQ(cells[1] + cells[3], doctest::Approx(pj).epsilon(1e-12));  // P(X_j = 1)
    }
}

TEST_CASE("coupling bounds at symmetric half marginals") {
    const auto [lo, hi] = coupling_bounds(0.5, 0.5);
    CHECK_EQ(lo, doctest::Approx(-0.25).epsilon(1e-15));
    CHECK_EQ(hi, doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("perfectly correlated coins carry exactly one bit") {
    const TreeModel m = copy_instance(5);
    CHECK_EQ(tree_true_entropy(m), doctest::Approx(1.0).epsilon(1e-12));

    const auto joint = brute_force_joint(m);
    REQUIRE_EQ(joint.size(), 32);
    CHECK_EQ(joint[0], doctest::Approx(0.5).epsilon(1e-12));   // all zeros
    CHECK_EQ(joint[31], doctest::Approx(0.5).epsilon(1e-12));  // all ones
    CHECK_EQ(entropy_of(joint), doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tree entropy decomposition matches brute-force enumeration") {
    Rng rng(21);
    for (int t = 0; t < 12; ++t) {
        const std::size_t d = 2 + rng.uniform_int(6);  // 2..7
        const TreeModel m = random_tree_model(d, rng);
        CHECK_EQ(tree_true_entropy(m),
                 doctest::Approx(entropy_of(brute_force_joint(m))).epsilon(1e-9));
    }
}

TEST_CASE("random models satisfy their own invariants") {
    Rng rng(22);
    for (std::size_t d = 2; d <= 10; ++d) {
        const TreeModel m = random_tree_model(d, rng);
        CHECK_NOTHROW(m.validate());
        REQUIRE_EQ(m.edges.size(), d - 1);
        for (std::size_t e = 0; e < m.edges.size(); ++e) {
            const auto [lo, hi] = coupling_bounds(m.marginal_params[m.edges[e].first],
                                                  m.marginal_params[m.edges[e].second]);
            CHECK_GT(m.couplings[e], lo);
            CHECK_LT(m.couplings[e], hi);
        }
    }
}

TEST_CASE("model validation rejects structural defects") {
    TreeModel cycle;
    cycle.d = 3;
    cycle.edges = {{0, 1}, {1, 2}, {2, 0}};
    cycle.marginal_params = {0.5, 0.5, 0.5};
    cycle.couplings = {0.1, 0.1, 0.1};
    CHECK_THROWS_AS(cycle.validate(), std::invalid_argument);

    TreeModel split;
    split.d = 4;
    split.edges = {{0, 1}, {2, 3}, {0, 1}};
    split.marginal_params = {0.5, 0.5, 0.5, 0.5};
    split.couplings = {0.1, 0.1, 0.1};
    CHECK_THROWS_AS(split.validate(), std::invalid_argument);

    TreeModel degenerate = copy_instance(3);  // zero cells
    CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);

    TreeModel boundary;
    boundary.d = 2;
    boundary.edges = {{0, 1}};
    boundary.marginal_params = {0.0, 0.5};
    boundary.couplings = {0.0};
    CHECK_THROWS_AS(boundary.validate(), std::invalid_argument);
}

TEST_CASE("coupling solves for a target edge mutual information") {
    for (double target : {0.1, 0.3, 0.5, 0.8}) {
        const double r = coupling_for_target_mi(0.5, target);
        JointTable t;
        t.dims = {2, 2};
        const auto cells = edge_cells(0.5, 0.5, r);
        t.mass = {cells[0], cells[1], cells[2], cells[3]};
        CHECK_EQ(mutual_information(t), doctest::Approx(target).epsilon(1e-6));
    }
    CHECK_EQ(coupling_for_target_mi(0.5, 0.0), 0.0);
    CHECK_THROWS_AS(coupling_for_target_mi(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("exact marginals agree with brute-force sums and model parameters") {
    Rng rng(23);
    const TreeModel m = random_tree_model(5, rng);
    const auto joint = brute_force_joint(m);

    for (std::size_t v = 0; v < 5; ++v) {
        const auto one = exact_marginal(m, {v});
        REQUIRE_EQ(one.dims, std::vector<std::size_t>{2});
        CHECK_EQ(one.mass[1], doctest::Approx(m.marginal_params[v]).epsilon(1e-12));
    }

    // Pairwise table against a manual sum, in the given (most significant
    // first) axis order.
    const auto pair = exact_marginal(m, {3, 1});
    double direct[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t idx = 0; idx < joint.size(); ++idx) {
        const int x3 = (idx >> 3) & 1;
        const int x1 = (idx >> 1) & 1;
        direct[x3][x1] += joint[idx];
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            CHECK_EQ(pair.at(a, b), doctest::Approx(direct[a][b]).epsilon(1e-12));

    // Axis order follows the request.
    const auto rev = exact_marginal(m, {1, 3});
    CHECK_EQ(rev.at(0, 1), doctest::Approx(pair.at(1, 0)).epsilon(1e-14));
}

TEST_CASE("compiled tree: lazy coordinates equal the full sample") {
    Rng rng(24);
    const TreeModel m = random_tree_model(6, rng);
    const CompiledTree tree(m);
    const std::uint64_t seed = 991;
    for (std::uint64_t u = 0; u < 50; ++u) {
        const auto full = tree.full_sample(seed, u);
        REQUIRE_EQ(full.size(), 6);
        for (std::size_t v = 0; v < 6; ++v) CHECK_EQ(tree.coordinate(seed, u, v), full[v]);
    }
}

TEST_CASE("compiled tree sampling matches the exact joint (chi-square)") {
    Rng rng(25);
    const TreeModel m = random_tree_model(3, rng);
    const CompiledTree tree(m);
    const auto joint = brute_force_joint(m);

    const int draws = 30000;
    std::vector<int> counts(8, 0);
    for (int u = 0; u < draws; ++u) {
        const auto s = tree.full_sample(4242, static_cast<std::uint64_t>(u));
        ++counts[s[0] | (s[1] << 1) | (s[2] << 2)];
    }
    double chi2 = 0.0;
    for (int c = 0; c < 8; ++c) {
        const double expected = draws * joint[c];
        chi2 += (counts[c] - expected) * (counts[c] - expected) / expected;
    }
    CHECK_LT(chi2, 24.322);  // df = 7, significance 0.001
}

TEST_CASE("sequential sampling is reproducible and boundary-safe") {
    const TreeModel degenerate = copy_instance(4);
    Rng a(7), b(7);
    for (int i = 0; i < 20; ++i) {
        const auto s1 = sample_full(degenerate, a);
        const auto s2 = sample_full(degenerate, b);
        CHECK_EQ(s1, s2);
        // Perfect correlation: all coordinates equal.
        for (std::size_t v = 1; v < s1.size(); ++v) CHECK_EQ(s1[v], s1[0]);
    }
}
