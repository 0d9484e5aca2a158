#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ddspde/partition.hpp"
#include "test_support.hpp"

using namespace ddspde;
using namespace testsupport;

TEST_CASE("single subdomain is the constant weight 1") {
    const Grid2D g = build_grid(5);
    const PartitionOfUnity p = build_strip_partition(g, 1, 0.37);
    CHECK(p.subdomains() == 1);
    for (double v : p.chi(0).values()) CHECK(v == 1.0);
    CHECK(p.support(0) == std::pair{0, 4});

    std::mt19937_64 gen(1);
    const ScalarField v = random_field(g, gen);
    const ScalarField w = p.apply_weight(0, v);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == v[i]);
}

TEST_CASE("two strips with overlap 0.1: trapezoid values") {
    // Grid with nodes exactly at 0.44, 0.5 and 0.56 (spacing 0.02).
    const Grid2D g = build_grid(49);
    const PartitionOfUnity p = build_strip_partition(g, 2, 0.1);

    CHECK(p.chi_at(0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.chi_at(0, 0.44) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.chi_at(0, 0.56) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    const int i_44 = 21, i_50 = 24, i_56 = 27;
    REQUIRE(g.coord(i_44) == doctest::Approx(0.44).epsilon(1e-14));
    CHECK(p.chi(0).at(i_44, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.chi(0).at(i_50, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.chi(0).at(i_56, 3) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(p.chi(1).at(i_50, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("partition of unity sums to one at every node") {
    std::mt19937_64 gen(9);
    for (int s : {1, 2, 3, 4, 7}) {
        for (double overlap : {0.05, 0.1}) {
            const Grid2D g = build_grid(33);
            const PartitionOfUnity p = build_strip_partition(g, s, overlap);
            std::uniform_int_distribution<int> pick(0, g.n_interior - 1);
            for (int trial = 0; trial < 10; ++trial) {
                const int i1 = pick(gen), i2 = pick(gen);
                double sum = 0.0;
                for (int l = 0; l < s; ++l) sum += p.chi(l).at(i1, i2);
                CHECK(std::abs(sum - 1.0) <= 1e-15);
            }
            for (int l = 0; l < s; ++l) {
                for (double v : p.chi(l).values()) {
                    CHECK(v >= 0.0);
                    CHECK(v <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("weights depend on x1 only") {
    const Grid2D g = build_grid(17);
    const PartitionOfUnity p = build_strip_partition(g, 4, 0.1);
    for (int l = 0; l < 4; ++l) {
        for (int i1 = 0; i1 < g.n_interior; ++i1) {
            const double ref = p.chi(l).at(i1, 0);
            for (int i2 = 1; i2 < g.n_interior; ++i2) {
                CHECK(p.chi(l).at(i1, i2) == ref);
            }
        }
    }
}

TEST_CASE("split_weight_apply: sum property and support confinement") {
    const Grid2D g = build_grid(21);
    const PartitionOfUnity p = build_strip_partition(g, 4, 0.08);
    std::mt19937_64 gen(17);
    const ScalarField v = random_field(g, gen);

    ScalarField sum(g);
    for (int l = 0; l < 4; ++l) {
        const ScalarField piece = p.apply_weight(l, v);
        const auto [lo, hi] = p.support(l);
        for (int i1 = 0; i1 < g.n_interior; ++i1) {
            for (int i2 = 0; i2 < g.n_interior; ++i2) {
                if (i1 < lo || i1 > hi) CHECK(piece.at(i1, i2) == 0.0);
            }
        }
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += piece[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(sum[i] == doctest::Approx(v[i]).epsilon(1e-14));
    }

    // v == 1 summing back to 1 everywhere.
    const ScalarField ones(g, 1.0);
    ScalarField total(g);
    for (int l = 0; l < 4; ++l) {
        const ScalarField piece = p.apply_weight(l, ones);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += piece[i];
    }
    for (double value : total.values()) {
        CHECK(value == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("psi_(1,1) weighted by an off-support strip vanishes there") {
    const Grid2D g = build_grid(19);
    const PartitionOfUnity p = build_strip_partition(g, 4, 0.1);
    const ScalarField psi = sample_function(g, [](double x1, double x2) {
        return 2.0 * std::sin(std::numbers::pi * x1) * std::sin(std::numbers::pi * x2);
    });
    const ScalarField piece = p.apply_weight(3, psi);
    const auto [lo, hi] = p.support(3);
    REQUIRE(lo > 0);
    for (int i1 = 0; i1 < lo; ++i1) {
        for (int i2 = 0; i2 < g.n_interior; ++i2) CHECK(piece.at(i1, i2) == 0.0);
    }
}

TEST_CASE("invalid construction and indexing") {
    const Grid2D g = build_grid(9);
    CHECK_THROWS_AS(build_strip_partition(g, 0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(build_strip_partition(g, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_strip_partition(g, 4, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(build_strip_partition(g, 4, -0.1), std::invalid_argument);
    CHECK_NOTHROW(build_strip_partition(g, 4, 0.24));

    const PartitionOfUnity p = build_strip_partition(g, 2, 0.1);
    CHECK_THROWS_AS(p.chi(2), std::out_of_range);
    CHECK_THROWS_AS(p.chi(-1), std::out_of_range);
    CHECK_THROWS_AS(p.apply_weight(5, ScalarField(g, 1.0)), std::out_of_range);
    CHECK_THROWS_AS(p.apply_weight(0, ScalarField(build_grid(3), 1.0)),
                    std::invalid_argument);
}

TEST_CASE("partition CSV dump") {
    const Grid2D g = build_grid(3);
    const PartitionOfUnity p = build_strip_partition(g, 4, 0.1);
    std::ostringstream os;
    write_partition_csv(p, os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "x1,chi_1,chi_2,chi_3,chi_4");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
}
