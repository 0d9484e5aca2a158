#include "ddspde/noise.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ddspde/rng.hpp"

namespace ddspde {

KLSpectrum build_spectrum(int K, double delta, const Grid2D& grid) {
    if (K < 1) {
        throw std::invalid_argument("build_spectrum: K must be >= 1, got " +
                                    std::to_string(K));
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("build_spectrum: delta must be > 0, got " +
                                    std::to_string(delta));
    }

    KLSpectrum spec;
    spec.K_ = K;
    spec.delta_ = delta;
    spec.grid_ = grid;

    spec.q_.resize(static_cast<std::size_t>(K) * K);
    const double exponent = -0.5 - delta;
    for (int k1 = 1; k1 <= K; ++k1) {
        for (int k2 = 1; k2 <= K; ++k2) {
            spec.q_[spec.mode_index(k1, k2)] =
                std::pow(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2,
                         exponent);
        }
    }

    const int n = grid.n_interior;
    spec.sine_.resize(static_cast<std::size_t>(K) * n);
    for (int k = 1; k <= K; ++k) {
        for (int i = 0; i < n; ++i) {
            spec.sine_[(k - 1) * static_cast<std::size_t>(n) + i] =
                std::sin(k * std::numbers::pi * grid.coord(i));
        }
    }
    return spec;
}

ScalarField KLSpectrum::eigenfunction(int k1, int k2) const {
    if (k1 < 1 || k1 > K_ || k2 < 1 || k2 > K_) {
        throw std::out_of_range("KLSpectrum::eigenfunction: mode index outside spectrum");
    }
    ScalarField out(grid_);
    for (int i1 = 0; i1 < grid_.n_interior; ++i1) {
        for (int i2 = 0; i2 < grid_.n_interior; ++i2) {
            out.at(i1, i2) = eigenfunction_value(k1, k2, i1, i2);
        }
    }
    return out;
}

NoisePath::NoisePath(KLSpectrum spectrum, TimeGrid time_grid, std::uint64_t seed,
                     std::vector<double> increments)
    : spectrum_(std::move(spectrum)),
      time_grid_(std::move(time_grid)),
      seed_(seed),
      increments_(std::move(increments)) {}

NoisePath sample_path(const KLSpectrum& spectrum, const TimeGrid& time_grid,
                      std::uint64_t seed) {
    const std::size_t modes = spectrum.mode_count();
    const int N = time_grid.steps();
    std::vector<double> increments(static_cast<std::size_t>(N) * modes);

    const std::uint64_t base = combine(seed, 0x6E6F697365ULL);
    for (int n = 1; n <= N; ++n) {
        const double sd = std::sqrt(time_grid.step_size(n));
        const std::uint64_t step_key = combine(base, static_cast<std::uint64_t>(n));
        double* out = increments.data() + (n - 1) * modes;
        for (std::size_t m = 0; m < modes; ++m) {
            out[m] = sd * standard_normal(combine(step_key, m));
        }
    }
    return NoisePath(spectrum, time_grid, seed, std::move(increments));
}

ScalarField NoisePath::increment_field(int n, int K_trunc) const {
    if (n < 1 || n > time_grid_.steps()) {
        throw std::out_of_range("NoisePath::increment_field: step " +
                                std::to_string(n) + " outside [1, " +
                                std::to_string(time_grid_.steps()) + "]");
    }
    if (K_trunc < 1 || K_trunc > spectrum_.truncation()) {
        throw std::out_of_range("NoisePath::increment_field: K_trunc " +
                                std::to_string(K_trunc) +
                                " exceeds stored spectrum K = " +
                                std::to_string(spectrum_.truncation()));
    }

    // Separable synthesis of sum_{|k|<=K} sqrt(q_k) dbeta_k psi_k:
    // contract the k2 index against the sine table first, then k1.
    const int n_int = spectrum_.grid().n_interior;
    const std::size_t modes = spectrum_.mode_count();
    const double* coeff = increments_.data() + (n - 1) * modes;

    std::vector<double> partial(static_cast<std::size_t>(K_trunc) * n_int, 0.0);
    for (int k1 = 1; k1 <= K_trunc; ++k1) {
        double* row = partial.data() + (k1 - 1) * static_cast<std::size_t>(n_int);
        for (int k2 = 1; k2 <= K_trunc; ++k2) {
            const std::size_t m = spectrum_.mode_index(k1, k2);
            const double c = std::sqrt(spectrum_.eigenvalue(k1, k2)) * coeff[m];
            const auto sine2 = spectrum_.sine_row(k2);
            for (int i2 = 0; i2 < n_int; ++i2) row[i2] += c * sine2[i2];
        }
    }

    ScalarField field(spectrum_.grid());
    auto out = field.values();
    for (int k1 = 1; k1 <= K_trunc; ++k1) {
        const double* row = partial.data() + (k1 - 1) * static_cast<std::size_t>(n_int);
        const auto sine1 = spectrum_.sine_row(k1);
        for (int i1 = 0; i1 < n_int; ++i1) {
            const double s = 2.0 * sine1[i1];
            double* dst = out.data() + static_cast<std::size_t>(i1) * n_int;
            for (int i2 = 0; i2 < n_int; ++i2) dst[i2] += s * row[i2];
        }
    }
    return field;
}

NoisePath aggregate_to_coarse(const NoisePath& fine, int refinement) {
    if (refinement < 1) {
        throw std::invalid_argument("aggregate_to_coarse: refinement must be >= 1");
    }
    const int fine_steps = fine.time_grid().steps();
    if (fine_steps % refinement != 0) {
        throw std::invalid_argument(
            "aggregate_to_coarse: fine step count " + std::to_string(fine_steps) +
            " not divisible by refinement " + std::to_string(refinement));
    }
    if (!fine.time_grid().is_uniform()) {
        throw std::invalid_argument("aggregate_to_coarse: fine grid must be uniform");
    }
    if (refinement == 1) return fine;

    const int coarse_steps = fine_steps / refinement;
    std::vector<double> nodes(coarse_steps + 1);
    for (int n = 0; n <= coarse_steps; ++n) {
        nodes[n] = fine.time_grid().node(n * refinement);
    }

    const std::size_t modes = fine.spectrum().mode_count();
    std::vector<double> increments(static_cast<std::size_t>(coarse_steps) * modes,
                                   0.0);
    for (int n = 1; n <= coarse_steps; ++n) {
        double* out = increments.data() + (n - 1) * modes;
        for (int j = (n - 1) * refinement + 1; j <= n * refinement; ++j) {
            const auto fine_coeff = fine.step_coefficients(j);
            for (std::size_t m = 0; m < modes; ++m) out[m] += fine_coeff[m];
        }
    }
    return NoisePath(fine.spectrum(), TimeGrid(std::move(nodes)), fine.seed(),
                     std::move(increments));
}

NoisePath make_noise_path(const KLSpectrum& spectrum, const TimeGrid& time_grid,
                          std::vector<double> coefficients) {
    const std::size_t expected =
        static_cast<std::size_t>(time_grid.steps()) * spectrum.mode_count();
    if (coefficients.size() != expected) {
        throw std::invalid_argument("make_noise_path: need " +
                                    std::to_string(expected) + " coefficients, got " +
                                    std::to_string(coefficients.size()));
    }
    return NoisePath(spectrum, time_grid, 0, std::move(coefficients));
}

double truncation_tail(int K, double delta, int cap) {
    if (cap <= K) {
        throw std::invalid_argument("truncation_tail: cap " + std::to_string(cap) +
                                    " must exceed K = " + std::to_string(K));
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("truncation_tail: delta must be > 0");
    }
    const double exponent = -0.5 - delta;
    double tail = 0.0;
    // Indices with K < max(k1,k2) <= cap.
    for (int k1 = 1; k1 <= cap; ++k1) {
        for (int k2 = std::max(K + 1, 1); k2 <= cap; ++k2) {
            tail += std::pow(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2,
                             exponent);
        }
    }
    for (int k1 = K + 1; k1 <= cap; ++k1) {
        for (int k2 = 1; k2 <= K; ++k2) {
            tail += std::pow(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2,
                             exponent);
        }
    }
    return tail;
}

void write_spectrum_csv(const KLSpectrum& spectrum, std::ostream& os) {
    os << "k1,k2,q\n";
    char buf[64];
    for (int k1 = 1; k1 <= spectrum.truncation(); ++k1) {
        for (int k2 = 1; k2 <= spectrum.truncation(); ++k2) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", k1, k2,
                          spectrum.eigenvalue(k1, k2));
            os << buf;
        }
    }
}

}  // namespace ddspde
