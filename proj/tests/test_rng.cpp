#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "forestscan/rng.hpp"

using namespace forestscan;

TEST_SUITE("rng") {

TEST_CASE("streams are deterministic and order-independent") {
    KeyedRng a(42, stream_tag("x"), 7);
    KeyedRng b(42, stream_tag("x"), 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // A stream's output does not depend on what other streams consumed.
    KeyedRng noise(42, stream_tag("x"), 8);
    for (int i = 0; i < 17; ++i) noise.next_u64();
    KeyedRng c(42, stream_tag("x"), 7);
    KeyedRng d(42, stream_tag("x"), 7);
    (void)noise.next_u64();
    for (int i = 0; i < 100; ++i) CHECK(c.next_u64() == d.next_u64());
}

TEST_CASE("distinct keys give distinct streams") {
    std::set<uint64_t> firsts;
    for (uint64_t seed : {1ull, 2ull, 3ull})
        for (uint64_t tag : {stream_tag("a"), stream_tag("b")})
            for (uint64_t index = 0; index < 4; ++index)
                firsts.insert(KeyedRng(seed, tag, index).next_u64());
    CHECK(firsts.size() == 3 * 2 * 4);
}

TEST_CASE("next_double covers [0,1) uniformly enough") {
    KeyedRng rng(123, stream_tag("unit"));
    double sum = 0.0, lo = 1.0, hi = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double v = rng.next_double();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(lo < 0.001);
    CHECK(hi > 0.999);
}

TEST_CASE("next_double(lo,hi) stays in range and hits both halves") {
    KeyedRng rng(7, stream_tag("range"));
    int below = 0;
    for (int i = 0; i < 10000; ++i) {
        double v = rng.next_double(-2.0, 6.0);
        REQUIRE(v >= -2.0);
        REQUIRE(v < 6.0);
        if (v < 2.0) ++below;
    }
    CHECK(below > 4500);
    CHECK(below < 5500);
}

TEST_CASE("next_below is in range and roughly uniform") {
    KeyedRng rng(99, stream_tag("below"));
    std::vector<int> buckets(7, 0);
    for (int i = 0; i < 70000; ++i) {
        uint64_t v = rng.next_below(7);
        REQUIRE(v < 7);
        ++buckets[v];
    }
    for (int count : buckets) {
        CHECK(count > 9000);
        CHECK(count < 11000);
    }
}

TEST_CASE("derive_seed matches the stream constructor keying") {
    CHECK(derive_seed(5, stream_tag("scene")) == derive_seed(5, stream_tag("scene")));
    CHECK(derive_seed(5, stream_tag("scene")) != derive_seed(5, stream_tag("error")));
    CHECK(derive_seed(5, stream_tag("scene")) != derive_seed(6, stream_tag("scene")));
}

} // TEST_SUITE
