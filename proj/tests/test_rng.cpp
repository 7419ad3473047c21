#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "eqlab/rng.hpp"

using eqlab::SeededRng;

TEST_CASE("same seed produces the identical stream") {
    SeededRng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    SeededRng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("derive is position-independent and label-sensitive") {
    SeededRng base(7);
    base.next_u64();
    base.next_u64();
    SeededRng d1 = base.derive("stream/a");
    SeededRng d2 = SeededRng(7).derive("stream/a");
    for (int i = 0; i < 100; ++i) CHECK(d1.next_u64() == d2.next_u64());
    SeededRng d3 = base.derive("stream/b");
    CHECK(d3.next_u64() != SeededRng(7).derive("stream/a").next_u64());
}

TEST_CASE("uniform01 stays in [0,1)") {
    SeededRng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("gaussian moments") {
    SeededRng rng(11);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("bits are roughly balanced") {
    SeededRng rng(5);
    int ones = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ones += rng.next_bit();
    CHECK(std::abs(ones - n / 2) < 4 * std::sqrt(n / 4.0));
}
