#include "ldpe/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>

#include "ldpe/distributions.hpp"
#include "ldpe/gini_collision.hpp"
#include "ldpe/shannon_chain_star.hpp"
#include "ldpe/shannon_tree.hpp"
#include "ldpe/tree_model.hpp"

namespace ldpe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint32_t ceil_log2(std::uint64_t k) {
    std::uint32_t bits = 0;
    while ((std::uint64_t{1} << bits) < k) ++bits;
    return bits;
}

void fill_errors(ResultRow& row) {
    row.abs_error = std::abs(row.estimate - row.truth);
    row.rel_error = row.truth != 0.0 ? row.abs_error / std::abs(row.truth) : kNaN;
}

void fill_accounting(ResultRow& row, const PoolAudit& audit) {
    row.users_consumed = audit.users_consumed;
    row.bits_total = audit.total_bits;
    row.rounds = audit.rounds;
}

// Distinct trial slots may run on different threads; slot i only ever touches
// rows[i], so the merged output is identical for every thread count.
void run_indexed(std::uint64_t count, std::uint32_t threads,
                 const std::function<void(std::uint64_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::uint64_t workers = std::min<std::uint64_t>(threads, count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::uint64_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::uint64_t i = t; i < count; i += workers) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

CategoricalDistribution scalar_distribution(const ExperimentConfig& config) {
    if (config.scalar_dist == "uniform") {
        CategoricalDistribution dist;
        dist.probs.assign(config.k, 1.0 / static_cast<double>(config.k));
        return dist;
    }
    if (config.scalar_dist == "exponential") return exponential_distribution(config.k);
    throw std::invalid_argument("unknown scalar distribution: " + config.scalar_dist);
}

const std::vector<std::uint32_t> kDefaultDGrid = {10, 20, 40, 80};
const std::vector<std::uint64_t> kDefaultBudgetGrid = {1000,  2500,  5000, 10000,
                                                       25000, 50000, 100000};

std::vector<std::size_t> random_permutation(std::size_t d, Rng& rng) {
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = d - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(i + 1));
        std::swap(order[i], order[j]);
    }
    return order;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults_for(const std::string& task) {
    ExperimentConfig c;
    c.task = task;
    if (task == "fig1a") {
        c.epsilon = 0.25;
        c.delta = 0.7;
        c.alpha = 1.0;
        c.sample_constant = 2.0;
        c.trials = 100;
        c.d_grid = kDefaultDGrid;
    } else if (task == "fig1b") {
        c.k = 1000;
        c.alpha = 1.0;
        c.b = 1;
        c.trials = 100;
        c.budget_grid = kDefaultBudgetGrid;
    } else if (task == "shannon-tree") {
        c.d = 20;
        c.epsilon = 0.25;
        c.delta = 0.2;
    } else if (task == "shannon-chain") {
        c.d = 8;
        c.epsilon = 0.1;
        c.delta = 0.1;
    } else if (task == "shannon-star") {
        c.d = 10;
        c.epsilon = 0.1;
        c.delta = 0.1;
    } else if (task == "gini" || task == "collision") {
        c.k = 1000;
        c.b = 1;
        c.users = 100000;
    } else {
        throw std::invalid_argument("unknown task: " + task);
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (task == "fig1a" || task == "shannon-tree") {
        if (d < 2 && d_grid.empty()) throw std::invalid_argument("d must be at least 2");
    } else if (task == "shannon-chain") {
        if (d < 3) throw std::invalid_argument("chain recovery needs d >= 3");
    } else if (task == "shannon-star") {
        if (d < 3) throw std::invalid_argument("star recovery needs d >= 3");
    } else if (task == "gini" || task == "collision" || task == "fig1b") {
        if (k < 2) throw std::invalid_argument("scalar support must be at least 2");
        if (b < 1 || b > 32) throw std::invalid_argument("hash width must be 1..32");
    } else {
        throw std::invalid_argument("unknown task: " + task);
    }
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_to_string(const std::vector<ResultRow>& rows,
                          const std::vector<std::string>& comments) {
    std::ostringstream out;
    for (const auto& c : comments) {
        if (!c.empty() && c[0] == '#')
            out << c << '\n';
        else
            out << "# " << c << '\n';
    }
    out << "task,method,d,k,epsilon,delta,alpha,b,trial,seed,estimate,truth,"
           "abs_error,rel_error,users_consumed,distinct_pairs,bits_total,rounds\n";
    for (const auto& r : rows) {
        out << r.task << ',' << r.method << ',' << r.d << ',' << r.k << ','
            << format_double(r.epsilon) << ',' << format_double(r.delta) << ','
            << format_double(r.alpha) << ',' << r.b << ',' << r.trial << ',' << r.seed << ','
            << format_double(r.estimate) << ',' << format_double(r.truth) << ','
            << format_double(r.abs_error) << ',' << format_double(r.rel_error) << ','
            << r.users_consumed << ',' << r.distinct_pairs << ',' << r.bits_total << ','
            << r.rounds << '\n';
    }
    return out.str();
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows,
               const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << csv_to_string(rows, comments);
    if (!out) throw std::runtime_error("write failed: " + path);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty vector");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of_mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("stderr of empty vector");
    if (v.size() == 1) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty vector");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<ResultRow> run_fig1a(const ExperimentConfig& config) {
    config.validate();
    const std::vector<std::uint32_t>& grid = config.d_grid.empty() ? kDefaultDGrid : config.d_grid;
    const std::uint64_t trials = config.trials;
    std::vector<ResultRow> rows(grid.size() * trials);

    run_indexed(rows.size(), config.threads, [&](std::uint64_t idx) {
        const std::size_t point = static_cast<std::size_t>(idx / trials);
        const std::uint64_t trial = idx % trials;
        const std::uint32_t d = grid[point];
        const std::uint64_t trial_seed = derive(config.seed, point, trial);
        Rng rng(trial_seed);

        const TreeModel model = random_tree_model(d, rng);
        const double truth = tree_true_entropy(model);

        TreeEstimatorConfig tcfg;
        tcfg.alpha = config.alpha;
        tcfg.epsilon = config.epsilon;
        tcfg.delta = config.delta;
        tcfg.sample_constant = config.sample_constant;

        // Worst case: every unordered pair estimated once plus all marginals;
        // the pool is lazy, so the 1.5x headroom costs nothing.
        const auto mi_spec =
            GoodEstimateSpec::make(config.alpha, config.epsilon / 2.0,
                                   config.delta / (static_cast<double>(d) * d), 4,
                                   config.sample_constant);
        const auto marg_spec = GoodEstimateSpec::make(
            config.alpha, config.epsilon, config.delta / d, 2, config.sample_constant);
        const std::uint64_t worst =
            std::uint64_t{d} * (d - 1) / 2 * mi_spec.n_samples + std::uint64_t{d} * marg_spec.n_samples;
        UserPool pool = pool_from_tree(model, worst + worst / 2, rng, PoolMode::sequential);

        MstEstimatorState state;
        const EstimateReport rep = estimate_tree_entropy(pool, d, tcfg, rng, &state);

        ResultRow row;
        row.task = "fig1a";
        row.method = "tree_estimator";
        row.d = d;
        row.epsilon = config.epsilon;
        row.delta = config.delta;
        row.alpha = config.alpha;
        row.trial = trial;
        row.seed = trial_seed;
        row.estimate = rep.value;
        row.truth = truth;
        fill_errors(row);
        fill_accounting(row, pool.audit());
        row.distinct_pairs = state.edge_cache.size();
        rows[idx] = std::move(row);
    });

    // The exhaustive-pairwise baseline's count is analytic: one row per d.
    for (std::size_t point = 0; point < grid.size(); ++point) {
        const std::uint32_t d = grid[point];
        ResultRow row;
        row.task = "fig1a";
        row.method = "chow_liu";
        row.d = d;
        row.epsilon = config.epsilon;
        row.delta = config.delta;
        row.alpha = config.alpha;
        row.estimate = kNaN;
        row.truth = kNaN;
        row.abs_error = kNaN;
        row.rel_error = kNaN;
        row.distinct_pairs = std::uint64_t{d} * (d - 1) / 2;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> run_fig1b(const ExperimentConfig& config) {
    config.validate();
    const std::vector<std::uint64_t>& grid =
        config.budget_grid.empty() ? kDefaultBudgetGrid : config.budget_grid;
    const std::uint64_t trials = config.trials;
    const CategoricalDistribution dist = scalar_distribution(config);
    const double truth = collision_entropy(dist);
    const std::uint32_t raw_bits = ceil_log2(config.k);

    static const char* kMethods[3] = {"skorski", "hash_nonprivate", "hash_private"};
    std::vector<ResultRow> rows(grid.size() * 3 * trials);

    run_indexed(rows.size(), config.threads, [&](std::uint64_t idx) {
        const std::size_t point = static_cast<std::size_t>(idx / (3 * trials));
        const std::uint64_t rest = idx % (3 * trials);
        const std::size_t method = static_cast<std::size_t>(rest / trials);
        const std::uint64_t trial = rest % trials;
        const std::uint64_t budget = grid[point];
        const std::uint64_t trial_seed = derive(config.seed, point, method, trial);
        Rng rng(derive(trial_seed, 0));

        ResultRow row;
        row.task = "fig1b";
        row.method = kMethods[method];
        row.k = config.k;
        row.trial = trial;
        row.seed = trial_seed;
        row.truth = truth;

        EstimateReport rep;
        PoolAudit audit;
        if (method == 0) {
            const std::uint64_t n = budget / raw_bits;
            UserPool pool = pool_from_categorical(dist, n, rng, PoolMode::non_interactive);
            rep = skorski_baseline(pool, config.k);
            audit = pool.audit();
            row.alpha = kInf;
            row.b = raw_bits;
        } else {
            const double alpha = method == 1 ? kInf : config.alpha;
            const std::uint64_t hash_seed = derive(trial_seed, 1);
            const std::uint64_t n = budget / config.b;
            UserPool pool = pool_from_categorical(dist, n, rng, PoolMode::non_interactive);
            rep = run_gini_collision(pool, config.b, alpha, hash_seed, rng);
            audit = pool.audit();
            row.alpha = alpha;
            row.b = config.b;
        }
        row.estimate = rep.value;
        fill_errors(row);
        fill_accounting(row, audit);
        row.distinct_pairs = static_cast<std::uint64_t>(rep.extras.at("pairs"));
        rows[idx] = std::move(row);
    });
    return rows;
}

std::vector<ResultRow> run_estimator_task(const ExperimentConfig& config) {
    config.validate();
    const std::uint64_t trials = config.trials;
    std::vector<ResultRow> rows(trials);

    run_indexed(trials, config.threads, [&](std::uint64_t trial) {
        const std::uint64_t trial_seed = derive(config.seed, 0, trial);
        Rng rng(trial_seed);

        ResultRow row;
        row.task = config.task;
        row.method = config.task;
        row.epsilon = config.epsilon;
        row.delta = config.delta;
        row.alpha = config.alpha;
        row.trial = trial;
        row.seed = trial_seed;

        if (config.task == "gini" || config.task == "collision") {
            const CategoricalDistribution dist = scalar_distribution(config);
            const std::uint64_t hash_seed = derive(trial_seed, 1);
            UserPool pool =
                pool_from_categorical(dist, config.users, rng, PoolMode::non_interactive);
            const EstimateReport rep =
                run_gini_collision(pool, config.b, config.alpha, hash_seed, rng);
            row.k = config.k;
            row.b = config.b;
            if (config.task == "gini") {
                row.estimate = rep.extras.at("gini_hat");
                row.truth = gini_entropy(dist);
            } else {
                row.estimate = rep.value;
                row.truth = collision_entropy(dist);
            }
            fill_errors(row);
            fill_accounting(row, pool.audit());
            row.distinct_pairs = static_cast<std::uint64_t>(rep.extras.at("pairs"));
        } else if (config.task == "shannon-tree") {
            const std::uint32_t d = config.d;
            const TreeModel model = random_tree_model(d, rng);
            TreeEstimatorConfig tcfg;
            tcfg.alpha = config.alpha;
            tcfg.epsilon = config.epsilon;
            tcfg.delta = config.delta;
            tcfg.sample_constant = config.sample_constant;
            const auto mi_spec =
                GoodEstimateSpec::make(config.alpha, config.epsilon / 2.0,
                                       config.delta / (static_cast<double>(d) * d), 4,
                                       config.sample_constant);
            const auto marg_spec = GoodEstimateSpec::make(
                config.alpha, config.epsilon, config.delta / d, 2, config.sample_constant);
            const std::uint64_t worst = std::uint64_t{d} * (d - 1) / 2 * mi_spec.n_samples +
                                        std::uint64_t{d} * marg_spec.n_samples;
            UserPool pool = pool_from_tree(model, worst + worst / 2, rng, PoolMode::sequential);
            MstEstimatorState state;
            const EstimateReport rep = estimate_tree_entropy(pool, d, tcfg, rng, &state);
            row.d = d;
            row.estimate = rep.value;
            row.truth = tree_true_entropy(model);
            fill_errors(row);
            fill_accounting(row, pool.audit());
            row.distinct_pairs = state.edge_cache.size();
        } else if (config.task == "shannon-chain" || config.task == "shannon-star") {
            const std::uint32_t d = config.d;
            CmiTestConfig ccfg;
            ccfg.epsilon = config.epsilon;
            ccfg.alpha = config.alpha;
            ccfg.delta = config.delta;
            ccfg.sample_constant = config.sample_constant;

            TreeModel model;
            std::uint64_t worst = 0;
            if (config.task == "shannon-chain") {
                const std::vector<std::size_t> order = random_permutation(d, rng);
                std::vector<double> couplings(d - 1);
                for (auto& r : couplings)
                    r = coupling_for_target_mi(0.5, 0.3 + 0.6 * rng.uniform01());
                model = make_chain_model(order, 0.5, couplings);

                const double log2d = std::log2(static_cast<double>(d));
                const auto test_spec = GoodEstimateSpec::make(
                    config.alpha, config.epsilon, config.delta / (3.0 * d * log2d), 8,
                    config.sample_constant);
                const auto mi_spec = GoodEstimateSpec::make(config.alpha, config.epsilon,
                                                            config.delta / (2.0 * d), 4,
                                                            config.sample_constant);
                const auto marg_spec = GoodEstimateSpec::make(config.alpha, config.epsilon,
                                                              config.delta / (2.0 * d), 2,
                                                              config.sample_constant);
                const std::uint64_t max_tests =
                    3 + std::uint64_t{d - 3} * (2 + ceil_log2(d));
                worst = max_tests * test_spec.n_samples + std::uint64_t{d} * marg_spec.n_samples +
                        std::uint64_t{d - 1} * mi_spec.n_samples;
            } else {
                const std::size_t center = static_cast<std::size_t>(rng.uniform_int(d));
                std::vector<double> couplings(d - 1);
                for (auto& r : couplings)
                    r = coupling_for_target_mi(0.5, 0.3 + 0.4 * rng.uniform01());
                model = make_star_model(d, center, 0.5, couplings);

                const auto mi_spec = GoodEstimateSpec::make(config.alpha, config.epsilon,
                                                            config.delta / (6.0 * d), 4,
                                                            config.sample_constant);
                const auto marg_spec = GoodEstimateSpec::make(config.alpha, config.epsilon,
                                                              config.delta / (6.0 * d), 2,
                                                              config.sample_constant);
                worst = std::uint64_t{3} * (d - 1) * mi_spec.n_samples +
                        std::uint64_t{d} * marg_spec.n_samples;
            }

            UserPool pool = pool_from_tree(model, worst + worst / 2, rng, PoolMode::sequential);
            const EstimateReport rep = config.task == "shannon-chain"
                                           ? estimate_chain_entropy(pool, d, ccfg, rng)
                                           : estimate_star_entropy(pool, d, ccfg, rng);
            row.d = d;
            row.estimate = rep.value;
            row.truth = tree_true_entropy(model);
            fill_errors(row);
            fill_accounting(row, pool.audit());
        } else {
            throw std::invalid_argument("unknown task: " + config.task);
        }
        rows[trial] = std::move(row);
    });
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    if (config.task == "fig1a") return run_fig1a(config);
    if (config.task == "fig1b") return run_fig1b(config);
    return run_estimator_task(config);
}

EstimateReport run_chow_liu_baseline(UserPool& pool, std::uint32_t d, double alpha,
                                     double epsilon, double delta, double sample_constant,
                                     Rng& rng) {
    if (d < 2) throw std::invalid_argument("need at least 2 variables");
    const auto mi_spec = GoodEstimateSpec::make(
        alpha, epsilon, delta / (static_cast<double>(d) * d), 4, sample_constant);
    const auto marg_spec =
        GoodEstimateSpec::make(alpha, epsilon, delta / d, 2, sample_constant);

    std::vector<double> mi(std::size_t{d} * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double est = good_mi_estimate(pool, i, j, mi_spec, rng);
            mi[i * d + j] = est;
            mi[j * d + i] = est;
        }

    // Exact maximum spanning tree over the estimated weights (Prim).
    std::vector<bool> in_tree(d, false);
    std::vector<double> best(d, -kInf);
    std::vector<std::size_t> parent(d, 0);
    in_tree[0] = true;
    for (std::size_t j = 1; j < d; ++j) {
        best[j] = mi[j];  // row 0
        parent[j] = 0;
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    double w_hat = 0.0;
    for (std::size_t step = 1; step < d; ++step) {
        std::size_t pick = d;
        for (std::size_t j = 0; j < d; ++j)
            if (!in_tree[j] && (pick == d || best[j] > best[pick])) pick = j;
        in_tree[pick] = true;
        edges.emplace_back(parent[pick], pick);
        w_hat += best[pick];
        for (std::size_t j = 0; j < d; ++j)
            if (!in_tree[j] && mi[pick * d + j] > best[j]) {
                best[j] = mi[pick * d + j];
                parent[j] = pick;
            }
    }

    double s_hat = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        s_hat += good_entropy_estimate(pool, {i}, marg_spec, rng);

    const PoolAudit audit = pool.audit();
    EstimateReport report;
    report.value = s_hat - w_hat;
    report.users_consumed = audit.users_consumed;
    report.max_bits_per_user = audit.max_bits_per_user;
    report.rounds = audit.rounds;
    report.seed = pool.sample_seed();
    report.extras["W_hat"] = w_hat;
    report.extras["S_hat"] = s_hat;
    report.extras["pairs_estimated"] = static_cast<double>(std::uint64_t{d} * (d - 1) / 2);
    auto& flat = report.series["mst_edges"];
    for (const auto& e : edges) {
        flat.push_back(static_cast<double>(std::min(e.first, e.second)));
        flat.push_back(static_cast<double>(std::max(e.first, e.second)));
    }
    return report;
}

std::string plot_data_to_string(const std::vector<ResultRow>& rows) {
    // (task, method, x) -> samples; the y statistic depends on the task.
    std::map<std::tuple<std::string, std::string, double>, std::vector<double>> groups;
    for (const auto& r : rows) {
        double x, y;
        if (r.task == "fig1a") {
            x = static_cast<double>(r.d);
            y = static_cast<double>(r.distinct_pairs);
        } else if (r.task == "fig1b") {
            x = static_cast<double>(r.bits_total);
            y = r.rel_error;
        } else {
            x = r.d != 0 ? static_cast<double>(r.d) : static_cast<double>(r.k);
            y = r.estimate;
        }
        groups[{r.task, r.method, x}].push_back(y);
    }
    std::ostringstream out;
    out << "task,method,x,y,yerr,n\n";
    for (const auto& [key, ys] : groups) {
        const auto& [task, method, x] = key;
        double y, yerr;
        if (task == "fig1b") {
            std::vector<double> sorted = ys;
            std::sort(sorted.begin(), sorted.end());
            y = median(sorted);
            const double lo = sorted[sorted.size() / 4];
            const double hi = sorted[(3 * sorted.size()) / 4 >= sorted.size()
                                         ? sorted.size() - 1
                                         : (3 * sorted.size()) / 4];
            yerr = 0.5 * (hi - lo);
        } else {
            y = mean(ys);
            yerr = stderr_of_mean(ys);
        }
        out << task << ',' << method << ',' << format_double(x) << ',' << format_double(y)
            << ',' << format_double(yerr) << ',' << ys.size() << '\n';
    }
    return out.str();
}

void emit_plot_data(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << plot_data_to_string(rows);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ldpe
