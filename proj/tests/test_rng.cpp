#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "ldpe/rng.hpp"

using namespace ldpe;

TEST_CASE("derive is deterministic and tag-sensitive") {
    CHECK_EQ(derive(42, 7), derive(42, 7));
    CHECK_NE(derive(42, 7), derive(42, 8));
    CHECK_NE(derive(42, 7), derive(43, 7));
    CHECK_NE(derive(42, 0, 1), derive(42, 1, 0));
    CHECK_EQ(derive(42, 1, 2, 3), derive(derive(derive(42, 1), 2), 3));

    // Consecutive tags must not produce near-identical streams.
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 1000; ++a) seen.insert(derive(99, a));
    CHECK_EQ(seen.size(), 1000);
}

TEST_CASE("uniform draws stay inside their stated ranges") {
    Rng rng(1);
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform01();
        CHECK_GE(u, 0.0);
        CHECK_LT(u, 1.0);
        const double v = rng.uniform_open01();
        CHECK_GT(v, 0.0);
        CHECK_LE(v, 1.0);
    }
}

TEST_CASE("uniform_int respects bounds") {
    Rng rng(2);
    for (std::uint64_t n : {2ull, 3ull, 5ull, 16ull, 1000ull}) {
        for (int i = 0; i < 2000; ++i) CHECK_LT(rng.uniform_int(n), n);
    }
    CHECK_EQ(rng.uniform_int(1), 0);
    CHECK_EQ(rng.uniform_int(0), 0);
}

TEST_CASE("uniform_int(4) passes a chi-square uniformity check") {
    Rng rng(3);
    const int draws = 40000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < draws; ++i) ++counts[rng.uniform_int(4)];
    const double expected = draws / 4.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK_LT(chi2, 16.266);  // df = 3, significance 0.001
}

TEST_CASE("uniform01_at is stateless and reproducible") {
    const double x = uniform01_at(7, 100, 3);
    CHECK_EQ(x, uniform01_at(7, 100, 3));
    CHECK_NE(x, uniform01_at(7, 100, 4));
    CHECK_GE(x, 0.0);
    CHECK_LT(x, 1.0);
}

TEST_CASE("normal draws have plausible first two moments") {
    Rng rng(4);
    const int n = 40000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        CHECK(std::isfinite(x));
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK_LT(std::abs(mean), 0.03);
    CHECK_LT(std::abs(var - 1.0), 0.06);
}

TEST_CASE("identically seeded generators replay the same stream") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK_EQ(a.u64(), b.u64());
}
