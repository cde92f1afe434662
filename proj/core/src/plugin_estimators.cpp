#include "ldpe/plugin_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ldpe/errors.hpp"

namespace ldpe {

GoodEstimateSpec GoodEstimateSpec::make(double alpha, double epsilon, double delta,
                                        std::uint32_t support, double sample_constant) {
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw InvalidEpsilon("accuracy target must lie in (0, 1/2]");
    if (!std::isfinite(alpha) || alpha <= 0.0)
        throw std::invalid_argument("sample-count rule needs finite positive alpha");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (support < 2) throw std::invalid_argument("support must be at least 2");
    if (!(sample_constant > 0.0)) throw std::invalid_argument("sample constant must be positive");

    GoodEstimateSpec s;
    s.alpha = alpha;
    s.epsilon = epsilon;
    s.delta = delta;
    s.support = support;
    double c = static_cast<double>(support);
    s.n_samples = static_cast<std::uint64_t>(std::ceil(
        sample_constant * c * c * std::log(1.0 / delta) / (epsilon * epsilon * alpha * alpha)));
    if (s.n_samples < 1) s.n_samples = 1;
    return s;
}

JointTable estimate_joint_table(UserPool& pool, const std::vector<std::size_t>& vars,
                                const GoodEstimateSpec& spec, Rng& rng) {
    if (vars.empty() || vars.size() > 3)
        throw std::invalid_argument("joint estimation covers 1 to 3 variables");
    for (std::size_t a = 0; a < vars.size(); ++a)
        for (std::size_t b = a + 1; b < vars.size(); ++b)
            if (vars[a] == vars[b]) throw std::invalid_argument("variable indices must be distinct");

    const std::size_t c = std::size_t{1} << vars.size();
    if (spec.support != c)
        throw std::invalid_argument("spec support does not match the queried variable set");

    PrivacyBudget budget{spec.alpha};
    std::vector<std::uint64_t> hist;
    switch (vars.size()) {
        case 1:
            hist = request_marginal_batch(pool, vars[0], budget, spec.n_samples, rng);
            break;
        case 2:
            hist = request_pair_batch(pool, vars[0], vars[1], budget, spec.n_samples, rng);
            break;
        default:
            hist = request_triplet_batch(pool, vars[0], vars[1], vars[2], budget, spec.n_samples,
                                         rng);
            break;
    }

    CategoricalDistribution flat = rr_invert_frequencies(hist, c, budget);

    // The histogram's symbol puts the smallest variable index in the least
    // significant bit; rebuild the table with axes in the requested order
    // (first axis most significant).
    std::vector<std::size_t> sorted = vars;
    std::sort(sorted.begin(), sorted.end());

    JointTable t;
    t.dims.assign(vars.size(), 2);
    t.mass.assign(c, 0.0);
    for (std::size_t s = 0; s < c; ++s) {
        std::size_t flat_idx = 0;
        for (std::size_t axis = 0; axis < vars.size(); ++axis) {
            std::size_t pos =
                static_cast<std::size_t>(std::find(sorted.begin(), sorted.end(), vars[axis]) -
                                         sorted.begin());
            std::size_t bit = (s >> pos) & 1u;
            flat_idx = flat_idx * 2 + bit;
        }
        t.mass[flat_idx] = flat.probs[s];
    }
    return t;
}

double good_entropy_estimate(UserPool& pool, const std::vector<std::size_t>& vars,
                             const GoodEstimateSpec& spec, Rng& rng) {
    return shannon_entropy(estimate_joint_table(pool, vars, spec, rng));
}

double good_mi_estimate(UserPool& pool, std::size_t i, std::size_t j,
                        const GoodEstimateSpec& spec, Rng& rng) {
    return mutual_information(estimate_joint_table(pool, {i, j}, spec, rng));
}

double good_cmi_estimate(UserPool& pool, std::size_t i, std::size_t j, std::size_t k,
                         const GoodEstimateSpec& spec, Rng& rng) {
    return conditional_mutual_information(estimate_joint_table(pool, {i, j, k}, spec, rng));
}

}  // namespace ldpe
