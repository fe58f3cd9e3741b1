#include "oracles.hpp"

#include <celltree/branching.hpp>

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace celltree;

TEST_CASE("split probability against Pascal's triangle") {
    CHECK(split_probability_exact(0, 1.0) == 0.0);
    CHECK(split_probability_exact(1, 1.0) == 0.0);
    CHECK(split_probability_exact(1, 0.5) == 0.5);
    for (std::uint32_t n : {2u, 3u, 9u, 10u, 57u, 256u, 1000u}) {
        for (double g : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            CAPTURE(n);
            CAPTURE(g);
            const double o = oracle::split_probability(n, g);
            const double p = split_probability_exact(n, g);
            if (o > 1e-300) {
                CHECK(std::abs(p - o) <= 1e-9 * o);
            } else {
                CHECK(p <= 1e-300);
            }
        }
    }
    const double big = split_probability_exact(1000000, 1.0);
    CHECK(std::abs(big - normal_upper_tail(1.0)) <= 1e-3);
}

TEST_CASE("normal tail") {
    CHECK(normal_upper_tail(0.0) == 0.5);
    CHECK(normal_upper_tail(2.0) == doctest::Approx(oracle::normal_tail(2.0)).epsilon(1e-12));
}

TEST_CASE("GW expected size") {
    CHECK(gw_expected_size({0.0}) == 1.0);
    CHECK_THROWS_AS(gw_expected_size({0.5}), std::domain_error);
    CHECK_THROWS_AS(gw_expected_size({0.7}), std::domain_error);
    CHECK(OffspringLaw{0.3}.mean() == doctest::Approx(0.6));
    CHECK(OffspringLaw{0.3}.subcritical());
    const auto sizes = simulate_gw_sizes({0.2}, 20000, 3);
    double mean = 0.0;
    double sq = 0.0;
    for (auto s : sizes) {
        mean += double(s);
        sq += double(s) * double(s);
    }
    mean /= double(sizes.size());
    const double se = std::sqrt((sq / double(sizes.size()) - mean * mean) / double(sizes.size()));
    CHECK(std::abs(mean - gw_expected_size({0.2})) <= 3.0 * se);
    CHECK(simulate_gw_sizes({0.2}, 100, 3, 1) == simulate_gw_sizes({0.2}, 100, 3, 4));
}

TEST_CASE("phi bound") {
    CHECK_THROWS(phi_gamma_bound(0.0));
    CHECK_THROWS(phi_gamma_bound(-1.0));
    const auto d = phi_gamma_details(1.0);
    CHECK(d.value > 0.0);
    CHECK(std::isfinite(d.value));
    CHECK(std::isfinite(d.ceiling_value));
    CHECK(d.value == doctest::Approx(oracle::phi_grid(1.0)).epsilon(1e-4));
    CHECK(d.epsilon > 0.0);
    CHECK(d.epsilon < 1.0 / (2.0 * normal_upper_tail(1.0)) - 1.0);
    CHECK(phi_gamma_bound(0.5) > phi_gamma_bound(1.0));
}

TEST_CASE("dyadic splitting") {
    CHECK(dyadic_internal_nodes(std::vector<double>{0.3}) == 0);
    CHECK(dyadic_internal_nodes(std::vector<double>{}) == 0);
    CHECK(dyadic_internal_nodes(std::vector<double>{0.1, 0.2, 0.3}) == 3);
    CHECK_THROWS_AS(dyadic_internal_nodes(std::vector<double>{0.4, 0.4}), DepthCapError);
}

TEST_CASE("uniform tree sizes") {
    const auto zero = simulate_uniform_tree_sizes(0, 1.0, 50, 1);
    for (auto s : zero.sizes) CHECK(s == 1);
    const auto a = simulate_uniform_tree_sizes(2000, 1.0, 60, 9, 1);
    const auto b = simulate_uniform_tree_sizes(2000, 1.0, 60, 9, 3);
    CHECK(a.sizes == b.sizes);
    CHECK(a.heights == b.heights);
    std::ostringstream out;
    write_tree_size_csv(out, a);
    const auto text = out.str();
    CHECK(text.rfind("trial,size,height\n0,", 0) == 0);
    CHECK(text.find("\nmean,") != std::string::npos);
}

TEST_CASE("gw suite on a reduced grid") {
    GwSuiteConfig config;
    config.band_max_count = 500;
    config.gw_trials = 20000;
    config.dyadic_trials = 2000;
    config.uniform_n = {1000, 10000};
    config.uniform_trials = 50;
    config.root_trials = 300;
    const auto rows = run_gw_suite(config);
    CHECK(rows.size() >= 10);
    for (const auto& r : rows) CHECK_MESSAGE(!r.failed(), r.check << ' ' << r.node << ' ' << r.n);
}
