#include <celltree/csv.hpp>
#include <celltree/estimator.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace celltree;

TEST_CASE("format_real prints 17 significant digits and round-trips") {
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(0.1) == "0.10000000000000001");
    for (double v : {0.1, 1.0 / 3.0, 2.5e-300, 123456.789, -7.25, 6.02214076e23}) {
        CHECK(parse_real(format_real(v)) == v);
    }
    CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_real(std::nan("")) == "nan");
}

TEST_CASE("parse_real rejects junk") {
    CHECK(parse_real(" 0.25 ") == 0.25);
    for (const char* bad : {"", "abc", "1.5x", "nan", "inf", "1,5"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_real(bad), std::invalid_argument);
    }
}

TEST_CASE("split_fields") {
    const auto f = split_fields("a,b,,c");
    REQUIRE(f.size() == 4);
    CHECK(f[2].empty());
    CHECK(f[3] == "c");
}

TEST_CASE("sample CSV reading") {
    {
        std::istringstream in("x\n0.5\r\n\n0.25\n");
        std::vector<std::size_t> lines;
        const auto v = read_sample_csv(in, &lines);
        CHECK(v == std::vector<double>{0.5, 0.25});
        CHECK(lines == std::vector<std::size_t>{2, 4});
    }
    {
        std::istringstream in("x\n");
        CHECK(read_sample_csv(in).empty());
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(read_sample_csv(empty), std::runtime_error);
    std::istringstream wrong_header("value\n0.1\n");
    CHECK_THROWS_WITH_AS(read_sample_csv(wrong_header), doctest::Contains("line 1"), std::runtime_error);
    std::istringstream junk("x\n0.1\n0.2\nzz\n");
    CHECK_THROWS_WITH_AS(read_sample_csv(junk), doctest::Contains("line 4"), std::runtime_error);
}

TEST_CASE("sample CSV round trip") {
    const std::vector<double> v{0.0, 0.1, 1.0 / 3.0, 1.0};
    std::ostringstream out;
    write_sample_csv(out, v);
    std::istringstream in(out.str());
    CHECK(read_sample_csv(in) == v);
}

TEST_CASE("estimate CSV round trip and validation") {
    const PiecewiseConstant f({0.0, 0.25, 1.0}, {2.5, 0.5});
    std::ostringstream out;
    write_estimate_csv(out, f);
    CHECK(out.str() == "left,right,height\n0,0.25,2.5\n0.25,1,0.5\n");
    std::istringstream in(out.str());
    const auto g = read_estimate_csv(in);
    CHECK(l1_distance(f, g) == 0.0);

    std::istringstream gap("left,right,height\n0,0.25,2\n0.5,1,1\n");
    CHECK_THROWS(read_estimate_csv(gap));
    std::istringstream short_row("left,right,height\n0,1\n");
    CHECK_THROWS(read_estimate_csv(short_row));
    std::istringstream header("a,b,c\n0,1,1\n");
    CHECK_THROWS(read_estimate_csv(header));
}
