#include "oracles.hpp"

#include <celltree/analysis.hpp>
#include <celltree/density.hpp>
#include <celltree/dyadic.hpp>

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace celltree;

TEST_CASE("node analysis invariants") {
    for (const auto& d : bounded_suite()) {
        for (std::uint32_t level = 0; level <= 6; ++level) {
            for (std::uint64_t i = 0; i < (1ULL << level); ++i) {
                const auto a = analyze_node(d, {level, i}, 1000, 4.0);
                CHECK(std::abs(a.p_left + a.p_right - a.p) <= 1e-12);
                CHECK(a.p_left >= a.p_right - 1e-15);
                CHECK(a.f_avg == doctest::Approx(a.p / DyadicInterval{level, i}.length()));
            }
        }
    }
}

TEST_CASE("balance") {
    for (std::uint32_t level : {0u, 3u, 9u}) CHECK(is_balanced(Density::uniform(), {level, 0}, 1000000, 0.1));
    const auto t = Density::triangular();
    CHECK_FALSE(is_balanced(t, {0, 0}, 100, 4.0));
    CHECK(is_balanced(t, {0, 0}, 100, 4.0, 2.0));
    CHECK(balanced_ancestor_count(Density::uniform(), {5, 3}, 100, 4.0) == 5);
    CHECK(balanced_ancestor_count(t, {1, 0}, 100, 4.0) == 0);
    CHECK(balanced_ancestor_count(t, {2, 0}, 100, 4.0) == 1);
}

TEST_CASE("ideal partitions") {
    const auto u = ideal_partition(Density::uniform(), 12345, 0.7);
    CHECK(u.estimate.pieces() == 1);
    CHECK(u.estimate.heights()[0] == 1.0);
    const auto capped = ideal_partition(Density::sqrt_singular(), 1000000, 1.0, 3);
    CHECK(capped.truncated);
    const auto free = ideal_partition(Density::sqrt_singular(), 1000000, 1.0);
    CHECK_FALSE(free.truncated);
    CHECK(tiles({0, 0}, free.cells));
}

TEST_CASE("proposition 3 bound scaling") {
    CHECK(proposition3_constant() == doctest::Approx(8.5945).epsilon(1e-4));
    CHECK(proposition3_bound(1, 8000, 4) == doctest::Approx(proposition3_bound(1, 1000, 4) / 2).epsilon(1e-13));
}

TEST_CASE("level sums") {
    const auto u = level_sums(Density::uniform(), 400, 1.0, 5);
    CHECK(u.gap_sum == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(u.sqrt_mass_sum == doctest::Approx(std::pow(2.0, 2.5) / 20.0).epsilon(1e-13));
    CHECK(u.unbalanced == 0);
    CHECK_THROWS_AS(level_sums(Density::uniform(), 400, 1.0, max_scan_level + 1), std::length_error);
}

TEST_CASE("ancestry counts for the uniform density") {
    const auto c = pj_counts(Density::uniform(), 100, 4.0, 8);
    REQUIRE(c.size() >= 9);
    for (std::size_t j = 0; j <= 8; ++j) {
        CHECK(c[j].nodes == (1ULL << j));
        CHECK(c[j].balanced == (1ULL << j));
    }
}

TEST_CASE("lemma 9 edge cases") {
    const auto t = Density::triangular();
    const std::vector<DyadicInterval> self{{2, 1}};
    CHECK(lemma9_check(t, {2, 1}, self));
    CHECK(refined_positive_error(t, self) ==
          doctest::Approx(oracle::positive_part(oracle::model("triangular"), 0.25, 0.5, 1.25)).epsilon(1e-9));
    const std::vector<DyadicInterval> gap{{3, 2}};
    CHECK_THROWS_AS(lemma9_check(t, {2, 1}, gap), std::invalid_argument);
    const std::vector<DyadicInterval> fine{{4, 4}, {4, 5}, {3, 3}};
    CHECK(lemma9_check(Density::uniform(), {2, 1}, fine));
}

TEST_CASE("holds_le tolerance") {
    CHECK(holds_le(1.0, 1.0));
    CHECK(holds_le(1.0 + 1e-14, 1.0));
    CHECK_FALSE(holds_le(1.0 + 1e-9, 1.0));
    CHECK(holds_le(0.0, 0.0));
}

TEST_CASE("lemma suite on a reduced grid") {
    LemmaSuiteConfig config;
    config.max_level = 6;
    config.refinements = 50;
    const auto rows = run_lemma_suite(config);
    std::set<std::string> names;
    bool saw_literal_gap = false;
    for (const auto& r : rows) {
        names.insert(r.lemma);
        if (r.enforced) CHECK_MESSAGE(r.pass, r.lemma << ' ' << r.density << ' ' << r.n << ' ' << r.level);
        if (r.lemma == "lemma8_literal" && r.density == "triangular" && r.n == 100 && r.gamma == 4.0 &&
            r.level == 0) {
            saw_literal_gap = true;
            CHECK(r.lhs == 3);
            CHECK(r.rhs == 2);
            CHECK_FALSE(r.pass);
            CHECK_FALSE(r.enforced);
        }
    }
    CHECK(saw_literal_gap);
    for (const char* name : {"lemma4_lower", "lemma4_upper", "lemma5", "lemma6", "lemma7_level", "lemma7_total",
                             "lemma7_alpha_0.5", "lemma7_alpha_sqrt2", "lemma8_balanced", "lemma8_relaxed",
                             "lemma8_literal", "lemma9", "proposition3"}) {
        CHECK_MESSAGE(names.count(name) == 1, name);
    }
    std::ostringstream out;
    write_lemma_csv(out, rows);
    CHECK(out.str().rfind("lemma,density,n,gamma,level,lhs,rhs,pass\n", 0) == 0);
    CHECK(out.str().find("info:false") != std::string::npos);
}
