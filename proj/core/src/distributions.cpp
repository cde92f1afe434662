#include "ldpe/distributions.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldpe {

namespace {

double xlog2x(double p) {
    return p > 0.0 ? p * std::log2(p) : 0.0;
}

double entropy_of(const std::vector<double>& probs) {
    double h = 0.0;
    for (double p : probs) h -= xlog2x(p);
    return h;
}

}  // namespace

void CategoricalDistribution::validate() const {
    if (probs.empty()) throw std::invalid_argument("distribution needs k >= 1");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative probability mass");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum));
}

std::size_t JointTable::total_cells() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
}

void JointTable::validate() const {
    if (dims.empty() || dims.size() > 3)
        throw std::invalid_argument("joint table supports 1 to 3 variables");
    if (mass.size() != total_cells())
        throw std::invalid_argument("joint table mass size does not match dims");
    double sum = 0.0;
    for (double p : mass) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative joint mass");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("joint mass sums to " + std::to_string(sum));
}

double& JointTable::at(std::size_t x, std::size_t y) {
    return mass[x * dims[1] + y];
}
double JointTable::at(std::size_t x, std::size_t y) const {
    return mass[x * dims[1] + y];
}
double& JointTable::at(std::size_t x, std::size_t y, std::size_t z) {
    return mass[(x * dims[1] + y) * dims[2] + z];
}
double JointTable::at(std::size_t x, std::size_t y, std::size_t z) const {
    return mass[(x * dims[1] + y) * dims[2] + z];
}

JointTable JointTable::marginalize(const std::vector<std::size_t>& keep) const {
    const std::size_t nvars = dims.size();
    for (std::size_t axis : keep)
        if (axis >= nvars) throw std::invalid_argument("marginalize: axis out of range");

    JointTable out;
    out.dims.reserve(keep.size());
    for (std::size_t axis : keep) out.dims.push_back(dims[axis]);
    out.mass.assign(out.total_cells() == 0 ? 1 : out.total_cells(), 0.0);

    // Walk every cell of the full table and accumulate into the kept axes.
    std::vector<std::size_t> idx(nvars, 0);
    for (std::size_t flat = 0; flat < mass.size(); ++flat) {
        std::size_t rem = flat;
        for (std::size_t a = nvars; a-- > 0;) {
            idx[a] = rem % dims[a];
            rem /= dims[a];
        }
        std::size_t out_flat = 0;
        for (std::size_t axis : keep) out_flat = out_flat * dims[axis] + idx[axis];
        out.mass[out_flat] += mass[flat];
    }
    return out;
}

CategoricalDistribution JointTable::flatten() const {
    return CategoricalDistribution{mass};
}

double shannon_entropy(const CategoricalDistribution& dist) {
    return entropy_of(dist.probs);
}

double gini_entropy(const CategoricalDistribution& dist) {
    double s = 0.0;
    for (double p : dist.probs) s += p * p;
    return 1.0 - s;
}

double collision_entropy(const CategoricalDistribution& dist) {
    return -std::log2(1.0 - gini_entropy(dist));
}

double shannon_entropy(const JointTable& joint) {
    return entropy_of(joint.mass);
}

double mutual_information(const JointTable& joint) {
    if (joint.dims.size() != 2)
        throw std::invalid_argument("mutual_information needs a 2-variable table");
    double hx = shannon_entropy(joint.marginalize({0}));
    double hy = shannon_entropy(joint.marginalize({1}));
    double hxy = shannon_entropy(joint);
    return hx + hy - hxy;
}

double conditional_mutual_information(const JointTable& joint) {
    if (joint.dims.size() != 3)
        throw std::invalid_argument("conditional_mutual_information needs a 3-variable table");
    double hxz = shannon_entropy(joint.marginalize({0, 2}));
    double hyz = shannon_entropy(joint.marginalize({1, 2}));
    double hxyz = shannon_entropy(joint);
    double hz = shannon_entropy(joint.marginalize({2}));
    return hxz + hyz - hxyz - hz;
}

CategoricalDistribution exponential_distribution(std::size_t k) {
    if (k < 1) throw std::invalid_argument("support size must be >= 1");
    // p_i = e^{-i} / sum_j e^{-j}. Factor out e^{-1} for numerical sanity:
    // p_i proportional to e^{-(i-1)} with the same normalization.
    CategoricalDistribution dist;
    dist.probs.resize(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        dist.probs[i] = std::exp(-static_cast<double>(i));
        sum += dist.probs[i];
    }
    for (double& p : dist.probs) p /= sum;
    return dist;
}

AliasSampler::AliasSampler(const CategoricalDistribution& dist) {
    const std::size_t k = dist.probs.size();
    accept_.assign(k, 1.0);
    alias_.assign(k, 0);

    std::vector<double> scaled(k);
    for (std::size_t i = 0; i < k; ++i) scaled[i] = dist.probs[i] * static_cast<double>(k);

    std::vector<std::uint32_t> small, large;
    small.reserve(k);
    large.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        std::uint32_t s = small.back();
        small.pop_back();
        std::uint32_t l = large.back();
        large.pop_back();
        accept_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    // Leftovers are 1.0 up to rounding.
    for (std::uint32_t i : large) accept_[i] = 1.0;
    for (std::uint32_t i : small) accept_[i] = 1.0;
}

std::size_t AliasSampler::sample(double u_bucket, double u_coin) const {
    const std::size_t k = accept_.size();
    auto bucket = static_cast<std::size_t>(u_bucket * static_cast<double>(k));
    if (bucket >= k) bucket = k - 1;
    return u_coin < accept_[bucket] ? bucket : alias_[bucket];
}

}  // namespace ldpe
