// Acceptance gate for the release-blocking behaviors of the library.
//
// Each criterion prints exactly one line:
//   criterion N: PASS (measured ...) [elapsed / budget]
//   criterion N: FAIL (measured ...) [elapsed / budget]
// and the process exits nonzero if any executed criterion fails. A criterion
// that finishes over its wall-clock budget fails even when its checks pass.
//
// Run all criteria with no arguments, or a single one with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ldpe/distributions.hpp"
#include "ldpe/experiments.hpp"
#include "ldpe/gini_collision.hpp"
#include "ldpe/ldp.hpp"
#include "ldpe/protocol.hpp"
#include "ldpe/rng.hpp"
#include "ldpe/shannon_chain_star.hpp"
#include "ldpe/shannon_tree.hpp"
#include "ldpe/tree_model.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// 1. The recovered tree weight and the telescoped level populations agree
//    bit for bit on random connected level graphs.

Outcome check_weight_identity() {
    ldpe::Rng rng(4101);
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::size_t d = 2 + rng.uniform_int(6);  // 2..7
        std::uint64_t m = 1 + rng.uniform_int(8);
        double epsilon = 0.05 + 0.45 * rng.uniform01();
        std::vector<std::vector<std::uint32_t>> w(d, std::vector<std::uint32_t>(d, 0));
        // A spanning chain over a random permutation keeps it connected.
        std::vector<std::size_t> perm(d);
        for (std::size_t i = 0; i < d; ++i) perm[i] = i;
        for (std::size_t i = d; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_int(i)]);
        for (std::size_t i = 1; i < d; ++i) {
            auto lvl = static_cast<std::uint32_t>(1 + rng.uniform_int(m));
            w[perm[i - 1]][perm[i]] = w[perm[i]][perm[i - 1]] = lvl;
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) {
                if (w[i][j] != 0) continue;
                auto lvl = static_cast<std::uint32_t>(rng.uniform_int(m + 1));
                w[i][j] = w[j][i] = lvl;
            }
        auto [lhs, rhs] = ldpe::mst_weight_identity_check(w, epsilon, m);
        if (lhs != rhs) {
            return {false, "trial " + std::to_string(t) + ": tree weight " + fmt(lhs, 17) +
                               " != level sum " + fmt(rhs, 17)};
        }
    }
    return {true, std::to_string(trials) + "/" + std::to_string(trials) +
                      " random level graphs: tree weight == telescoped level sums exactly"};
}

// ---------------------------------------------------------------------------
// 2. Worst-case likelihood ratios of both response channels equal e^alpha.

Outcome check_privacy_ratios() {
    double worst = 0.0;
    for (std::size_t k : {2u, 4u, 8u}) {
        for (double alpha : {0.3, 0.7, 1.0}) {
            double ratio = ldpe::verify_ldp_ratio(ldpe::krr_channel(k, alpha));
            double dev = std::abs(ratio - std::exp(alpha));
            worst = std::max(worst, dev);
            if (!(dev <= 1e-9)) {
                return {false, "randomized response k=" + std::to_string(k) +
                                   " alpha=" + fmt(alpha) + ": ratio " + fmt(ratio, 17) +
                                   " vs e^alpha " + fmt(std::exp(alpha), 17)};
            }
        }
    }
    for (std::uint32_t b : {1u, 2u, 4u}) {
        for (double alpha : {0.3, 0.7, 1.0}) {
            auto params = ldpe::HashChannelParams::for_alpha(b, alpha, 12345);
            double ratio = ldpe::verify_ldp_ratio(ldpe::hash_channel(params));
            double dev = std::abs(ratio - std::exp(alpha));
            worst = std::max(worst, dev);
            if (!(dev <= 1e-9)) {
                return {false, "hash channel b=" + std::to_string(b) + " alpha=" + fmt(alpha) +
                                   ": ratio " + fmt(ratio, 17) + " vs e^alpha " +
                                   fmt(std::exp(alpha), 17)};
            }
        }
    }
    return {true, "18 channel instances: worst |ratio - e^alpha| = " + fmt(worst, 3)};
}

// ---------------------------------------------------------------------------
// 3. The pairwise-hash collision-probability estimate is unbiased: over 1000
//    independent runs its mean lands within 3 standard errors of the truth.

Outcome check_collision_unbiasedness() {
    struct Setup {
        const char* name;
        ldpe::CategoricalDistribution dist;
        double alpha;
    };
    ldpe::CategoricalDistribution coin{{0.5, 0.5}};
    ldpe::CategoricalDistribution expo = ldpe::exponential_distribution(1000);
    const std::vector<Setup> setups = {
        {"uniform2/np", coin, kInf},
        {"uniform2/a1", coin, 1.0},
        {"exp1000/np", expo, kInf},
        {"exp1000/a1", expo, 1.0},
    };
    const std::uint64_t n = 100000;
    const int trials = 1000;
    std::string summary;
    double worst_z = 0.0;
    for (std::size_t s = 0; s < setups.size(); ++s) {
        const auto& setup = setups[s];
        const double truth = 1.0 - ldpe::gini_entropy(setup.dist);
        std::vector<double> estimates;
        estimates.reserve(trials);
        for (int t = 0; t < trials; ++t) {
            ldpe::Rng pool_rng(ldpe::derive(4301, s, static_cast<std::uint64_t>(t)));
            auto pool = ldpe::pool_from_categorical(setup.dist, n, pool_rng,
                                                    ldpe::PoolMode::non_interactive);
            std::uint64_t hash_seed = ldpe::derive(4302, s, static_cast<std::uint64_t>(t));
            ldpe::Rng est_rng(ldpe::derive(4303, s, static_cast<std::uint64_t>(t)));
            auto report = ldpe::run_gini_collision(pool, 1, setup.alpha, hash_seed, est_rng);
            estimates.push_back(report.extras.at("collision_prob_hat"));
        }
        double mu = ldpe::mean(estimates);
        double se = ldpe::stderr_of_mean(estimates);
        double z = std::abs(mu - truth) / se;
        worst_z = std::max(worst_z, z);
        if (!(std::abs(mu - truth) <= 3.0 * se)) {
            return {false, std::string(setup.name) + ": mean " + fmt(mu, 6) + " vs truth " +
                               fmt(truth, 6) + " is " + fmt(z, 3) + " standard errors off"};
        }
        if (!summary.empty()) summary += ", ";
        summary += std::string(setup.name) + " z=" + fmt(z, 2);
    }
    return {true, summary + "; all within 3 standard errors over 1000 runs"};
}

// ---------------------------------------------------------------------------
// 4. At a 10^4-bit budget the single-round estimators hit their accuracy
//    bars on the exponential law with support 1000.

Outcome check_budget_scan_accuracy() {
    auto cfg = ldpe::ExperimentConfig::defaults_for("fig1b");
    cfg.budget_grid = {10000};
    cfg.trials = 100;
    cfg.seed = 4404;
    auto rows = ldpe::run_fig1b(cfg);
    std::vector<double> skorski, hash_np;
    for (const auto& row : rows) {
        if (row.method == "skorski") skorski.push_back(row.rel_error);
        if (row.method == "hash_nonprivate") hash_np.push_back(row.rel_error);
    }
    if (skorski.size() != 100 || hash_np.size() != 100) {
        return {false, "expected 100 rows per method, got " + std::to_string(skorski.size()) +
                           " and " + std::to_string(hash_np.size())};
    }
    double med_sk = ldpe::median(skorski);
    double med_np = ldpe::median(hash_np);
    bool ok = med_sk <= 0.06 && med_np <= 0.05;
    return {ok, "median relative error at 10^4 bits: raw pairing " + fmt(med_sk, 3) +
                    " (bar 0.06), hash pairing " + fmt(med_np, 3) + " (bar 0.05)"};
}

// ---------------------------------------------------------------------------
// 5. Doubling d from 40 to 80 grows the measured pair-estimate count by at
//    most 2.8x, while estimating every pair would grow it by 4.05x.

Outcome check_pair_growth() {
    auto cfg = ldpe::ExperimentConfig::defaults_for("fig1a");
    cfg.d_grid = {40, 80};
    cfg.trials = 100;
    cfg.seed = 4505;
    auto rows = ldpe::run_fig1a(cfg);
    std::vector<double> pairs40, pairs80;
    double exhaustive40 = 0.0, exhaustive80 = 0.0;
    for (const auto& row : rows) {
        if (row.method == "tree_estimator" && row.d == 40)
            pairs40.push_back(static_cast<double>(row.distinct_pairs));
        if (row.method == "tree_estimator" && row.d == 80)
            pairs80.push_back(static_cast<double>(row.distinct_pairs));
        if (row.method == "chow_liu" && row.d == 40)
            exhaustive40 = static_cast<double>(row.distinct_pairs);
        if (row.method == "chow_liu" && row.d == 80)
            exhaustive80 = static_cast<double>(row.distinct_pairs);
    }
    if (pairs40.size() != 100 || pairs80.size() != 100 || exhaustive40 <= 0.0) {
        return {false, "unexpected row layout from the pair-count scan"};
    }
    double measured_ratio = ldpe::mean(pairs80) / ldpe::mean(pairs40);
    double exhaustive_ratio = exhaustive80 / exhaustive40;
    bool ok = measured_ratio <= 2.8 && exhaustive_ratio >= 3.9;
    return {ok, "pairs at d=80 / d=40: measured " + fmt(measured_ratio, 3) +
                    " (bar 2.8, means " + fmt(ldpe::mean(pairs40), 4) + " -> " +
                    fmt(ldpe::mean(pairs80), 4) + "); exhaustive " + fmt(exhaustive_ratio, 3) +
                    " (bar 3.9)"};
}

// ---------------------------------------------------------------------------
// 6. On 50 random 20-variable trees the private estimate lands within 5 bits
//    of the true entropy at least 75% of the time.

Outcome check_tree_accuracy() {
    auto cfg = ldpe::ExperimentConfig::defaults_for("shannon-tree");
    cfg.trials = 50;
    cfg.seed = 4606;
    auto rows = ldpe::run_estimator_task(cfg);
    if (rows.size() != 50) {
        return {false, "expected 50 trial rows, got " + std::to_string(rows.size())};
    }
    int hits = 0;
    std::vector<double> errors;
    for (const auto& row : rows) {
        errors.push_back(row.abs_error);
        if (row.abs_error <= 5.0) ++hits;
    }
    bool ok = hits >= 38;  // ceil(0.75 * 50)
    return {ok, std::to_string(hits) + "/50 trials within 5 bits (need 38); median error " +
                    fmt(ldpe::median(errors), 3) + " bits"};
}

// ---------------------------------------------------------------------------
// 7. Structure recovery: deterministic under exact estimates, and the full
//    private runs recover structure and entropy in at least 85% of trials.

bool matches_up_to_reversal(const std::vector<std::size_t>& got,
                            const std::vector<std::size_t>& want) {
    if (got == want) return true;
    std::vector<std::size_t> rev(want.rbegin(), want.rend());
    return got == rev;
}

Outcome check_structure_recovery() {
    const std::vector<std::size_t> chain_order = {7, 5, 3, 0, 1, 2, 4, 6};
    auto chain = ldpe::make_chain_model(chain_order, 0.5, std::vector<double>(7, 0.195));
    const std::size_t star_center = 4;
    auto star =
        ldpe::make_star_model(10, star_center, 0.5, std::vector<double>(9, 0.18625));

    // Exact estimates must recover both structures deterministically.
    auto chain_hooks = ldpe::exact_hooks(chain);
    for (int rep = 0; rep < 3; ++rep) {
        auto rec = ldpe::recover_chain_order(8, chain_hooks, 0.1, 1e-3);
        if (!matches_up_to_reversal(rec.order, chain_order)) {
            return {false, "exact-estimate chain recovery returned a wrong order"};
        }
    }
    auto star_hooks = ldpe::exact_hooks(star);
    for (std::size_t probe = 0; probe < 10; ++probe) {
        auto rec = ldpe::recover_star_center(10, probe, star_hooks, 1e-3);
        if (rec.center != star_center) {
            return {false, "exact-estimate star recovery missed the center from probe " +
                               std::to_string(probe)};
        }
    }

    // Private runs: structure recovered and entropy within epsilon*d.
    const ldpe::CmiTestConfig cfg{0.1, 1.0, 0.1, 8.0};
    const double chain_truth = ldpe::tree_true_entropy(chain);
    const double star_truth = ldpe::tree_true_entropy(star);
    const int trials = 50;

    int chain_ok = 0;
    for (int t = 0; t < trials; ++t) {
        ldpe::Rng pool_rng(ldpe::derive(4707, static_cast<std::uint64_t>(t)));
        auto pool =
            ldpe::pool_from_tree(chain, 5500000, pool_rng, ldpe::PoolMode::sequential);
        ldpe::Rng est_rng(ldpe::derive(4708, static_cast<std::uint64_t>(t)));
        auto report = ldpe::estimate_chain_entropy(pool, 8, cfg, est_rng);
        const auto& series = report.series.at("recovered_order");
        std::vector<std::size_t> got(series.size());
        for (std::size_t i = 0; i < series.size(); ++i)
            got[i] = static_cast<std::size_t>(series[i]);
        if (matches_up_to_reversal(got, chain_order) &&
            std::abs(report.value - chain_truth) <= 0.1 * 8) {
            ++chain_ok;
        }
    }

    int star_ok = 0;
    for (int t = 0; t < trials; ++t) {
        ldpe::Rng pool_rng(ldpe::derive(4709, static_cast<std::uint64_t>(t)));
        auto pool = ldpe::pool_from_tree(star, 3000000, pool_rng, ldpe::PoolMode::sequential);
        ldpe::Rng est_rng(ldpe::derive(4710, static_cast<std::uint64_t>(t)));
        auto report = ldpe::estimate_star_entropy(pool, 10, cfg, est_rng);
        bool centered = report.extras.at("center") == static_cast<double>(star_center);
        if (centered && std::abs(report.value - star_truth) <= 0.1 * 10) ++star_ok;
    }

    bool ok = chain_ok >= 43 && star_ok >= 43;  // ceil(0.85 * 50)
    return {ok, "exact recovery deterministic; private runs: chain " +
                    std::to_string(chain_ok) + "/50, star " + std::to_string(star_ok) +
                    "/50 recovered within " + fmt(0.1 * 8, 2) + "/" + fmt(0.1 * 10, 2) +
                    " bits (need 43)"};
}

// ---------------------------------------------------------------------------
// 8. Closed-form identities: collision entropy vs Gini, the channel-bias
//    round trip, and the tree entropy decomposition against brute force.

Outcome check_identities() {
    ldpe::Rng rng(4808);
    double worst_cg = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::size_t k = 2 + rng.uniform_int(49);
        ldpe::CategoricalDistribution dist;
        dist.probs.resize(k);
        double total = 0.0;
        for (auto& p : dist.probs) {
            p = rng.uniform_open01();
            total += p;
        }
        for (auto& p : dist.probs) p /= total;
        double lhs = ldpe::collision_entropy(dist);
        double rhs = -std::log2(1.0 - ldpe::gini_entropy(dist));
        worst_cg = std::max(worst_cg, std::abs(lhs - rhs));
        if (!(std::abs(lhs - rhs) <= 1e-12)) {
            return {false, "collision/Gini identity off by " + fmt(lhs - rhs, 3) +
                               " at support " + std::to_string(k)};
        }
    }

    double worst_rt = 0.0;
    for (std::uint32_t b : {1u, 2u, 4u, 8u, 16u, 32u}) {
        for (double lambda : {0.1, 0.3, 0.5, 0.75, 1.0}) {
            for (int i = 0; i <= 20; ++i) {
                double g = i / 20.0;
                double back = ldpe::bias_correction_roundtrip(g, b, lambda);
                worst_rt = std::max(worst_rt, std::abs(back - g));
                if (!(std::abs(back - g) <= 1e-12)) {
                    return {false, "bias round trip off by " + fmt(back - g, 3) + " at b=" +
                                       std::to_string(b) + " lambda=" + fmt(lambda, 3)};
                }
            }
        }
    }

    double worst_tree = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::size_t d = 2 + rng.uniform_int(6);
        auto model = ldpe::random_tree_model(d, rng);
        double decomposed = ldpe::tree_true_entropy(model);
        ldpe::CategoricalDistribution joint{ldpe::brute_force_joint(model)};
        double brute = ldpe::shannon_entropy(joint);
        worst_tree = std::max(worst_tree, std::abs(decomposed - brute));
        if (!(std::abs(decomposed - brute) <= 1e-9)) {
            return {false, "tree entropy decomposition off by " + fmt(decomposed - brute, 3) +
                               " at d=" + std::to_string(d)};
        }
    }
    return {true, "collision/Gini <= " + fmt(worst_cg, 2) + ", bias round trip <= " +
                      fmt(worst_rt, 2) + ", tree decomposition <= " + fmt(worst_tree, 2)};
}

// ---------------------------------------------------------------------------
// 9. Resource accounting: per-user bits and rounds match the protocol shape
//    exactly, and batches tile the consumed prefix of every pool.

bool batches_tile_consumed(const ldpe::UserPool& pool) {
    std::uint64_t next = 0;
    for (const auto& rec : pool.batch_log()) {
        if (rec.start != next || rec.count == 0) return false;
        next += rec.count;
    }
    return next == pool.users_consumed();
}

Outcome check_accounting() {
    // Single-round pairwise hash: every consumed user sends exactly b bits.
    {
        ldpe::Rng pool_rng(4901);
        ldpe::CategoricalDistribution coin{{0.5, 0.5}};
        auto pool =
            ldpe::pool_from_categorical(coin, 1001, pool_rng, ldpe::PoolMode::non_interactive);
        ldpe::Rng est_rng(4902);
        auto report = ldpe::run_gini_collision(pool, 3, 1.0, 4903, est_rng);
        auto audit = pool.audit();
        bool ok = audit.users_consumed == 1000 && audit.total_bits == 3000 &&
                  audit.max_bits_per_user == 3 && audit.rounds == 1 &&
                  report.rounds == 1 && batches_tile_consumed(pool) &&
                  pool.bits_sent(0) == 3 && pool.bits_sent(999) == 3 &&
                  pool.bits_sent(1000) == 0;
        if (!ok) {
            return {false, "pairwise hash at b=3: consumed " +
                               std::to_string(audit.users_consumed) + ", bits " +
                               std::to_string(audit.total_bits) + ", rounds " +
                               std::to_string(audit.rounds)};
        }
    }

    // Tree estimator: pair queries cost two bits, one user per round.
    std::uint64_t tree_users = 0;
    {
        ldpe::Rng model_rng(4904);
        auto model = ldpe::random_tree_model(4, model_rng);
        ldpe::Rng pool_rng(4905);
        auto pool = ldpe::pool_from_tree(model, 20000, pool_rng, ldpe::PoolMode::sequential);
        ldpe::TreeEstimatorConfig cfg;
        cfg.sample_constant = 0.5;
        ldpe::Rng est_rng(4906);
        auto report = ldpe::estimate_tree_entropy(pool, 4, cfg, est_rng);
        auto audit = pool.audit();
        tree_users = audit.users_consumed;
        bool ok = audit.max_bits_per_user <= 2 && audit.rounds == audit.users_consumed &&
                  report.rounds == audit.rounds && report.max_bits_per_user <= 2 &&
                  batches_tile_consumed(pool);
        if (!ok) {
            return {false, "tree run: max bits " + std::to_string(audit.max_bits_per_user) +
                               ", rounds " + std::to_string(audit.rounds) + " vs consumed " +
                               std::to_string(audit.users_consumed)};
        }
    }

    // Chain estimator: triplet queries cost three bits, one user per round.
    std::uint64_t chain_users = 0;
    {
        auto model = ldpe::make_chain_model({0, 1, 2, 3}, 0.5, std::vector<double>(3, 0.195));
        ldpe::Rng pool_rng(4907);
        auto pool = ldpe::pool_from_tree(model, 150000, pool_rng, ldpe::PoolMode::sequential);
        ldpe::CmiTestConfig cfg{0.1, 1.0, 0.1, 0.5};
        ldpe::Rng est_rng(4908);
        auto report = ldpe::estimate_chain_entropy(pool, 4, cfg, est_rng);
        auto audit = pool.audit();
        chain_users = audit.users_consumed;
        bool ok = audit.max_bits_per_user == 3 && audit.rounds == audit.users_consumed &&
                  report.rounds == audit.rounds && batches_tile_consumed(pool);
        if (!ok) {
            return {false, "chain run: max bits " + std::to_string(audit.max_bits_per_user) +
                               ", rounds " + std::to_string(audit.rounds) + " vs consumed " +
                               std::to_string(audit.users_consumed)};
        }
    }

    // Star estimator: pair queries only, so two bits at most.
    std::uint64_t star_users = 0;
    {
        auto model = ldpe::make_star_model(5, 2, 0.5, std::vector<double>(4, 0.18625));
        ldpe::Rng pool_rng(4909);
        auto pool = ldpe::pool_from_tree(model, 100000, pool_rng, ldpe::PoolMode::sequential);
        ldpe::CmiTestConfig cfg{0.1, 1.0, 0.1, 0.5};
        ldpe::Rng est_rng(4910);
        auto report = ldpe::estimate_star_entropy(pool, 5, cfg, est_rng);
        auto audit = pool.audit();
        star_users = audit.users_consumed;
        bool ok = audit.max_bits_per_user == 2 && audit.rounds == audit.users_consumed &&
                  report.rounds == audit.rounds && batches_tile_consumed(pool);
        if (!ok) {
            return {false, "star run: max bits " + std::to_string(audit.max_bits_per_user) +
                               ", rounds " + std::to_string(audit.rounds) + " vs consumed " +
                               std::to_string(audit.users_consumed)};
        }
    }

    return {true, "hash run 1000 users x 3 bits x 1 round; tree/chain/star runs (" +
                      std::to_string(tree_users) + "/" + std::to_string(chain_users) + "/" +
                      std::to_string(star_users) +
                      " users) each one user per round, <= 2/3/2 bits, batches tile"};
}

// ---------------------------------------------------------------------------

struct Criterion {
    int id;
    double budget_seconds;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, 5.0, check_weight_identity},
    {2, 1.0, check_privacy_ratios},
    {3, 120.0, check_collision_unbiasedness},
    {4, 300.0, check_budget_scan_accuracy},
    {5, 900.0, check_pair_growth},
    {6, 600.0, check_tree_accuracy},
    {7, 600.0, check_structure_recovery},
    {8, 10.0, check_identities},
    {9, 60.0, check_accounting},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (only < 0 || only > 9) {
        std::fprintf(stderr, "criterion must be between 1 and 9\n");
        return 2;
    }

    int failures = 0;
    for (const auto& crit : kCriteria) {
        if (only != 0 && crit.id != only) continue;
        auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = crit.fn();
        } catch (const std::exception& e) {
            outcome = {false, std::string("threw ") + e.what()};
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_budget = elapsed <= crit.budget_seconds;
        bool pass = outcome.pass && in_budget;
        std::string note = outcome.detail;
        if (!in_budget) note += "; over time budget";
        std::printf("criterion %d: %s (%s) [%.1fs / budget %.0fs]\n", crit.id,
                    pass ? "PASS" : "FAIL", note.c_str(), elapsed, crit.budget_seconds);
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
