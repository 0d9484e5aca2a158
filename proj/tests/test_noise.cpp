#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ddspde/noise.hpp"
#include "ddspde/rng.hpp"
#include "test_support.hpp"

using namespace ddspde;
using namespace testsupport;

TEST_CASE("eigenvalue formula") {
    const Grid2D g = build_grid(7);

    // Independent route: q_k = exp((-1/2 - delta) ln(k1^2 + k2^2)).
    const KLSpectrum paper = build_spectrum(4, 0.001, g);
    CHECK(paper.eigenvalue(1, 1) ==
          doctest::Approx(std::exp(-0.501 * std::log(2.0))).epsilon(1e-15));
    CHECK(paper.eigenvalue(1, 1) == doctest::Approx(0.7066168).epsilon(1e-6));
    CHECK(paper.eigenvalue(1, 2) ==
          doctest::Approx(std::exp(-0.501 * std::log(5.0))).epsilon(1e-15));
    CHECK(paper.eigenvalue(1, 2) == doctest::Approx(0.4464943).epsilon(1e-6));
    CHECK(paper.eigenvalue(2, 1) == paper.eigenvalue(1, 2));

    const KLSpectrum half = build_spectrum(2, 0.5, g);
    CHECK(half.eigenvalue(1, 1) == doctest::Approx(0.5).epsilon(1e-15));

    // Strictly decreasing along k1^2 + k2^2.
    const KLSpectrum spec = build_spectrum(6, 0.3, g);
    for (int a = 2; a <= 72; ++a) {
        double larger = -1.0, smaller = 2.0;
        for (int k1 = 1; k1 <= 6; ++k1) {
            for (int k2 = 1; k2 <= 6; ++k2) {
                if (k1 * k1 + k2 * k2 == a) larger = spec.eigenvalue(k1, k2);
                if (k1 * k1 + k2 * k2 == a + 1) smaller = spec.eigenvalue(k1, k2);
            }
        }
        if (larger > 0.0 && smaller < 2.0) CHECK(smaller < larger);
    }

    CHECK_THROWS_AS(build_spectrum(0, 0.5, g), std::invalid_argument);
    CHECK_THROWS_AS(build_spectrum(4, 0.0, g), std::invalid_argument);
    CHECK_THROWS_AS(build_spectrum(4, -1.0, g), std::invalid_argument);
}

TEST_CASE("discrete orthogonality of the eigenfunction samples") {
    const Grid2D g = build_grid(15);
    const KLSpectrum spec = build_spectrum(7, 0.5, g);
    for (int k1 = 1; k1 <= 7; ++k1) {
        for (int k2 = 1; k2 <= 7; ++k2) {
            for (int m1 = 1; m1 <= 7; ++m1) {
                for (int m2 = 1; m2 <= 7; ++m2) {
                    double acc = 0.0;
                    for (int i1 = 0; i1 < g.n_interior; ++i1) {
                        for (int i2 = 0; i2 < g.n_interior; ++i2) {
                            acc += spec.eigenfunction_value(k1, k2, i1, i2) *
                                   spec.eigenfunction_value(m1, m2, i1, i2);
                        }
                    }
                    acc *= g.spacing * g.spacing;
                    const double expect = (k1 == m1 && k2 == m2) ? 1.0 : 0.0;
                    CHECK(std::abs(acc - expect) <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("path sampling is deterministic in the seed") {
    const Grid2D g = build_grid(5);
    const KLSpectrum spec = build_spectrum(3, 0.5, g);
    const TimeGrid tg = make_uniform_time_grid(1.0, 4);
    const NoisePath a = sample_path(spec, tg, 42);
    const NoisePath b = sample_path(spec, tg, 42);
    const NoisePath c = sample_path(spec, tg, 43);
    bool all_equal = true, any_diff = false;
    for (int n = 1; n <= 4; ++n) {
        for (int k1 = 1; k1 <= 3; ++k1) {
            for (int k2 = 1; k2 <= 3; ++k2) {
                all_equal &= a.coefficient(n, k1, k2) == b.coefficient(n, k1, k2);
                any_diff |= a.coefficient(n, k1, k2) != c.coefficient(n, k1, k2);
            }
        }
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("sample mean of one increment coefficient over 1e5 paths") {
    const Grid2D g = build_grid(1);
    const KLSpectrum spec = build_spectrum(1, 0.5, g);
    const double h = 0.25;
    const TimeGrid tg = make_uniform_time_grid(h, 1);
    const int paths = 100000;
    double mean = 0.0;
    for (int m = 0; m < paths; ++m) {
        mean += sample_path(spec, tg, derive_stream(99, m)).coefficient(1, 1, 1);
    }
    mean /= paths;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(h / paths));
}

TEST_CASE("increment variance matches the step size") {
    const Grid2D g = build_grid(1);
    const KLSpectrum spec = build_spectrum(1, 0.5, g);
    const double h = 0.125;
    const TimeGrid tg = make_uniform_time_grid(2.0 * h, 2);
    const int paths = 50000;
    double m2 = 0.0;
    for (int m = 0; m < paths; ++m) {
        const double d = sample_path(spec, tg, derive_stream(7, m)).coefficient(2, 1, 1);
        m2 += d * d;
    }
    m2 /= paths;
    // Var(chi^2) = 2 h^2 for one Gaussian square.
    CHECK(std::abs(m2 - h) <= 4.0 * std::sqrt(2.0 * h * h / paths));
}

TEST_CASE("increment_field equals the brute-force Karhunen-Loeve sum") {
    const Grid2D g = build_grid(9);
    const KLSpectrum spec = build_spectrum(5, 0.2, g);
    const TimeGrid tg = make_uniform_time_grid(1.0, 3);
    const NoisePath path = sample_path(spec, tg, 1234);
    for (int n = 1; n <= 3; ++n) {
        for (int K : {1, 3, 5}) {
            const ScalarField fast = path.increment_field(n, K);
            const ScalarField slow = brute_force_increment_field(path, n, K);
            CHECK(max_abs_diff(fast, slow) <= 1e-12);
        }
    }
}

TEST_CASE("single active mode yields a scaled eigenfunction") {
    const Grid2D g = build_grid(6);
    const KLSpectrum spec = build_spectrum(2, 0.5, g);
    const TimeGrid tg = make_uniform_time_grid(1.0, 1);
    std::vector<double> coeffs(spec.mode_count(), 0.0);
    coeffs[spec.mode_index(1, 1)] = 1.0;
    const NoisePath path = make_noise_path(spec, tg, std::move(coeffs));
    const ScalarField field = path.increment_field(1, 2);
    const double scale = std::sqrt(0.5);  // sqrt(q_(1,1)) at delta = 1/2
    for (int i1 = 0; i1 < g.n_interior; ++i1) {
        for (int i2 = 0; i2 < g.n_interior; ++i2) {
            CHECK(field.at(i1, i2) ==
                  doctest::Approx(scale * spec.eigenfunction_value(1, 1, i1, i2))
                      .epsilon(1e-14));
        }
    }
}

TEST_CASE("truncation difference is orthogonal to the retained modes") {
    const Grid2D g = build_grid(15);
    const KLSpectrum spec = build_spectrum(2, 0.3, g);
    const TimeGrid tg = make_uniform_time_grid(1.0, 1);
    const NoisePath path = sample_path(spec, tg, 77);
    const ScalarField f1 = path.increment_field(1, 1);
    const ScalarField f2 = path.increment_field(1, 2);
    ScalarField diff(g);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = f2[i] - f1[i];
    const double proj = inner_product(diff, spec.eigenfunction(1, 1));
    CHECK(std::abs(proj) <= 1e-10);
}

TEST_CASE("shared modes are read from the same coefficients") {
    const Grid2D g = build_grid(5);
    const KLSpectrum spec = build_spectrum(4, 0.4, g);
    const TimeGrid tg = make_uniform_time_grid(1.0, 2);
    const NoisePath path = sample_path(spec, tg, 4242);
    // The coefficient accessor exposes one array, so any two truncations see
    // byte-identical dbeta on the modes they share; the synthesized fields
    // then differ exactly by the brute-force sum over the extra modes.
    const ScalarField low = path.increment_field(2, 2);
    const ScalarField high = path.increment_field(2, 4);
    ScalarField diff(g);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = high[i] - low[i];
    const ScalarField brute_low = brute_force_increment_field(path, 2, 2);
    const ScalarField brute_high = brute_force_increment_field(path, 2, 4);
    CHECK(max_abs_diff(low, brute_low) <= 1e-12);
    ScalarField tail(g);
    for (std::size_t i = 0; i < tail.size(); ++i) {
        tail[i] = brute_high[i] - brute_low[i];
    }
    CHECK(max_abs_diff(diff, tail) <= 1e-12);
}

TEST_CASE("aggregation to coarse steps") {
    const Grid2D g = build_grid(4);
    const KLSpectrum spec = build_spectrum(2, 0.5, g);
    const TimeGrid fine_grid = make_uniform_time_grid(1.0, 4);

    SUBCASE("refinement 1 is the identity") {
        const NoisePath fine = sample_path(spec, fine_grid, 9);
        const NoisePath same = aggregate_to_coarse(fine, 1);
        CHECK(same.time_grid() == fine.time_grid());
        for (int n = 1; n <= 4; ++n) {
            CHECK(same.coefficient(n, 2, 2) == fine.coefficient(n, 2, 2));
        }
    }

    SUBCASE("pairwise sums, exactly") {
        std::vector<double> coeffs(4 * spec.mode_count(), 0.0);
        const std::size_t m = spec.mode_index(1, 2);
        coeffs[0 * spec.mode_count() + m] = 0.25;   // step 1
        coeffs[1 * spec.mode_count() + m] = -0.75;  // step 2
        coeffs[2 * spec.mode_count() + m] = 1.5;    // step 3
        coeffs[3 * spec.mode_count() + m] = 2.0;    // step 4
        const NoisePath fine = make_noise_path(spec, fine_grid, std::move(coeffs));
        const NoisePath coarse = aggregate_to_coarse(fine, 2);
        CHECK(coarse.time_grid().steps() == 2);
        CHECK(coarse.coefficient(1, 1, 2) == 0.25 + -0.75);
        CHECK(coarse.coefficient(2, 1, 2) == 1.5 + 2.0);
        CHECK(coarse.coefficient(1, 1, 1) == 0.0);

        // Coupling exactness: a linear functional of the coarse increment
        // equals the same functional of the summed fine increments.
        const ScalarField coarse_field = coarse.increment_field(1, 2);
        const ScalarField f1 = fine.increment_field(1, 2);
        const ScalarField f2 = fine.increment_field(2, 2);
        std::mt19937_64 gen(3);
        const ScalarField probe = random_field(g, gen);
        const double lhs = inner_product(coarse_field, probe);
        ScalarField summed(g);
        for (std::size_t i = 0; i < summed.size(); ++i) summed[i] = f1[i] + f2[i];
        const double rhs = inner_product(summed, probe);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
    }

    SUBCASE("divisibility is enforced") {
        const NoisePath fine = sample_path(spec, fine_grid, 5);
        CHECK_THROWS_AS(aggregate_to_coarse(fine, 3), std::invalid_argument);
        CHECK_THROWS_AS(aggregate_to_coarse(fine, 0), std::invalid_argument);
    }
}

TEST_CASE("aggregated coefficient variance is r times the fine variance") {
    const Grid2D g = build_grid(1);
    const KLSpectrum spec = build_spectrum(1, 0.5, g);
    const int r = 4;
    const double h_fine = 1.0 / 16;
    const TimeGrid fine_grid = make_uniform_time_grid(1.0, 16);
    const int paths = 50000;
    double m2 = 0.0;
    for (int m = 0; m < paths; ++m) {
        const NoisePath fine = sample_path(spec, fine_grid, derive_stream(11, m));
        const NoisePath coarse = aggregate_to_coarse(fine, r);
        const double d = coarse.coefficient(2, 1, 1);
        m2 += d * d;
    }
    m2 /= paths;
    const double expect = r * h_fine;
    CHECK(std::abs(m2 - expect) <= 4.0 * std::sqrt(2.0 * expect * expect / paths));
}

TEST_CASE("discrete Ito isometry") {
    // E||dW^(n,K)||_H^2 = h sum_{|k|<=K} q_k; the nodal psi_k samples have
    // exact unit discrete norm for k <= n_interior, so the identity holds
    // at the grid level as well.
    const Grid2D g = build_grid(15);
    const TimeGrid tg = make_uniform_time_grid(0.5, 2);
    const double h = tg.step_size(1);
    for (double delta : {0.5, 0.001}) {
        const KLSpectrum spec = build_spectrum(4, delta, g);
        double trace = 0.0;
        for (int k1 = 1; k1 <= 4; ++k1) {
            for (int k2 = 1; k2 <= 4; ++k2) trace += spec.eigenvalue(k1, k2);
        }
        const int paths = 10000;
        double mean = 0.0, m2 = 0.0;
        for (int m = 0; m < paths; ++m) {
            const NoisePath path = sample_path(spec, tg, derive_stream(31, m));
            const double sq = norm_h_sq(path.increment_field(1, 4));
            mean += sq;
            m2 += sq * sq;
        }
        mean /= paths;
        m2 /= paths;
        const double se = std::sqrt((m2 - mean * mean) / paths);
        CHECK(std::abs(mean - h * trace) <= 4.0 * se);
    }
}

TEST_CASE("truncation tail") {
    // Three-term hand sum: q_(1,2) + q_(2,1) + q_(2,2) at delta = 1/2.
    CHECK(truncation_tail(1, 0.5, 2) ==
          doctest::Approx(1.0 / 5 + 1.0 / 5 + 1.0 / 8).epsilon(1e-15));

    CHECK_THROWS_AS(truncation_tail(2, 0.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(truncation_tail(3, 0.5, 2), std::invalid_argument);

    double previous = truncation_tail(1, 0.001, 64);
    for (int K = 2; K <= 32; K *= 2) {
        const double tail = truncation_tail(K, 0.001, 64);
        CHECK(tail < previous);
        CHECK(tail > 0.0);
        previous = tail;
    }
}

TEST_CASE("increment_field argument validation") {
    const Grid2D g = build_grid(3);
    const KLSpectrum spec = build_spectrum(2, 0.5, g);
    const TimeGrid tg = make_uniform_time_grid(1.0, 2);
    const NoisePath path = sample_path(spec, tg, 1);
    CHECK_THROWS_AS(path.increment_field(1, 3), std::out_of_range);
    CHECK_THROWS_AS(path.increment_field(0, 2), std::out_of_range);
    CHECK_THROWS_AS(path.increment_field(3, 2), std::out_of_range);
}
