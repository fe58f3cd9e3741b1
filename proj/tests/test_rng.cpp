#include <celltree/parallel.hpp>
#include <celltree/rng.hpp>

#include <doctest.h>

#include <atomic>
#include <numeric>
#include <stdexcept>
#include <vector>

using celltree::RngStream;

TEST_CASE("streams are reproducible and derived streams ignore parent state") {
    RngStream a(5);
    RngStream b(5);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
    const RngStream fresh(5);
    RngStream used(5);
    for (int i = 0; i < 10; ++i) (void)used.uniform();
    RngStream x = fresh.derive(3).derive(4);
    RngStream y = used.derive(3).derive(4);
    CHECK(x.uniform() == y.uniform());
    CHECK(fresh.derive(1).seed() != fresh.derive(2).seed());
    CHECK(RngStream(1).derive(2).seed() != RngStream(2).derive(1).seed());
}

TEST_CASE("uniform draws lie in [0, 1)") {
    RngStream r(8);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("parallel_for visits every index once for any worker count") {
    for (unsigned jobs : {0u, 1u, 2u, 7u}) {
        std::vector<int> hits(1000, 0);
        celltree::parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 1000);
        CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
    }
    celltree::parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("parallel_for rethrows a task failure") {
    for (unsigned jobs : {1u, 3u}) {
        CHECK_THROWS_AS(celltree::parallel_for(100, jobs,
                                               [](std::size_t i) {
                                                   if (i == 42) throw std::runtime_error("task failed");
                                               }),
                        std::runtime_error);
    }
}
