#include "doctest.h"

#include "k4f/rng.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace k4f;

TEST_CASE("counter stream matches the pure draw function")
{
    CounterRng rng(derive_key({1, 2, 3}));
    for (std::uint64_t c = 0; c < 100; ++c)
        CHECK(rng() == draw_at(rng.key(), c));
    CHECK(rng.counter() == 100);
    CounterRng again(derive_key({1, 2, 3}));
    CHECK(again.uniform() == unit_at(again.key(), 0));
}

TEST_CASE("derived keys are distinct across tuples")
{
    std::set<std::uint64_t> keys;
    for (std::uint64_t a = 0; a < 20; ++a)
        for (std::uint64_t b = 0; b < 20; ++b)
            for (std::uint64_t c = 0; c < 10; ++c)
                keys.insert(derive_key({a, b, c}));
    CHECK(keys.size() == 4000);
    CHECK(derive_key({1, 2}) != derive_key({2, 1}));
    CHECK(derive_key({1}) != derive_key({1, 0}));
}

TEST_CASE("unit draws lie in [0,1)")
{
    CHECK(to_unit(0) == 0.0);
    CHECK(to_unit(~std::uint64_t{0}) < 1.0);
    CounterRng rng(7);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 4 * std::sqrt(1.0 / 12 / 100000));
}

TEST_CASE("bounded draws are uniform")
{
    CounterRng rng(99);
    for (std::uint64_t bound : {1ULL, 2ULL, 7ULL, 10ULL}) {
        std::vector<double> counts(bound, 0);
        const int draws = 70000;
        for (int i = 0; i < draws; ++i) {
            const auto x = rng.below(bound);
            REQUIRE(x < bound);
            counts[x] += 1;
        }
        double chi2 = 0;
        const double e = double(draws) / double(bound);
        for (double c : counts)
            chi2 += (c - e) * (c - e) / e;
        // 0.999 quantile of chi-square with 9 degrees of freedom is 27.9
        CHECK(chi2 < 27.9);
    }
    CHECK(rng.below(0) == 0);
}
