#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ddspde/grid.hpp"
#include "ddspde/time_grid.hpp"

namespace ddspde {

/// Karhunen-Loeve spectrum of the Q-Wiener covariance on (0,1)^2:
///
///   q_k   = (k1^2 + k2^2)^(-1/2 - delta),
///   psi_k = 2 sin(k1 pi x1) sin(k2 pi x2),
///
/// over the index set {k = (k1,k2) : |k| = max(k1,k2) <= K}. Eigenfunction
/// samples are cached on the bound grid through their separable sine
/// factors. Immutable after construction.
class KLSpectrum {
public:
    int truncation() const { return K_; }
    double delta() const { return delta_; }
    const Grid2D& grid() const { return grid_; }

    /// q_k for 1-based mode indices.
    double eigenvalue(int k1, int k2) const {
        return q_[mode_index(k1, k2)];
    }

    /// psi_k sampled at node (i1, i2) (0-based node indices).
    double eigenfunction_value(int k1, int k2, int i1, int i2) const {
        const int n = grid_.n_interior;
        return 2.0 * sine_[(k1 - 1) * static_cast<std::size_t>(n) + i1] *
               sine_[(k2 - 1) * static_cast<std::size_t>(n) + i2];
    }

    /// psi_k as a grid field.
    ScalarField eigenfunction(int k1, int k2) const;

    /// sin(k pi x_i) table row for mode factor k.
    std::span<const double> sine_row(int k) const {
        return {sine_.data() + (k - 1) * static_cast<std::size_t>(grid_.n_interior),
                static_cast<std::size_t>(grid_.n_interior)};
    }

    std::size_t mode_count() const { return q_.size(); }
    std::size_t mode_index(int k1, int k2) const {
        return static_cast<std::size_t>(k1 - 1) * K_ + (k2 - 1);
    }

    friend KLSpectrum build_spectrum(int K, double delta, const Grid2D& grid);

private:
    KLSpectrum() = default;

    int K_ = 0;
    double delta_ = 0.0;
    Grid2D grid_;
    std::vector<double> q_;     // K*K, row-major by (k1, k2)
    std::vector<double> sine_;  // K*n, sine_[(k-1)*n + i] = sin(k pi x_i)
};

/// Builds the spectrum. Throws std::invalid_argument for K < 1 or delta <= 0.
KLSpectrum build_spectrum(int K, double delta, const Grid2D& grid);

/// One realization of the truncated Q-Wiener driver: Brownian increment
/// coefficients dbeta_k^n ~ N(0, h_n), independent across steps and modes,
/// fully determined by the seed. A path created per Monte Carlo sample;
/// reads are thread-safe.
class NoisePath {
public:
    const KLSpectrum& spectrum() const { return spectrum_; }
    const TimeGrid& time_grid() const { return time_grid_; }
    std::uint64_t seed() const { return seed_; }

    /// dbeta_k for step n (1-based) and 1-based mode indices.
    double coefficient(int n, int k1, int k2) const {
        return increments_[(n - 1) * spectrum_.mode_count() +
                           spectrum_.mode_index(k1, k2)];
    }

    /// All coefficients of step n, mode-major layout as in KLSpectrum.
    std::span<const double> step_coefficients(int n) const {
        return {increments_.data() + (n - 1) * spectrum_.mode_count(),
                spectrum_.mode_count()};
    }

    /// Truncated increment field
    ///   dW^(n,K_trunc)(x) = sum_{|k| <= K_trunc} sqrt(q_k) dbeta_k^n psi_k(x).
    /// Throws if K_trunc exceeds the stored spectrum or n is out of range.
    ScalarField increment_field(int n, int K_trunc) const;

    friend NoisePath sample_path(const KLSpectrum& spectrum,
                                 const TimeGrid& time_grid, std::uint64_t seed);
    friend NoisePath aggregate_to_coarse(const NoisePath& fine, int refinement);
    friend NoisePath make_noise_path(const KLSpectrum& spectrum,
                                     const TimeGrid& time_grid,
                                     std::vector<double> coefficients);

private:
    NoisePath(KLSpectrum spectrum, TimeGrid time_grid, std::uint64_t seed,
              std::vector<double> increments);

    KLSpectrum spectrum_;
    TimeGrid time_grid_;
    std::uint64_t seed_;
    std::vector<double> increments_;  // steps * modes
};

/// Draws the N x K^2 Gaussian coefficient array. Bit-reproducible for a
/// given seed on the same platform, independent of evaluation order.
NoisePath sample_path(const KLSpectrum& spectrum, const TimeGrid& time_grid,
                      std::uint64_t seed);

/// Coarse path on every refinement-th node of the fine grid; the step-n
/// coarse coefficient is the exact sum of the fine coefficients over steps
/// r(n-1)+1 .. rn. Requires a uniform fine grid with step count divisible
/// by the refinement.
NoisePath aggregate_to_coarse(const NoisePath& fine, int refinement);

/// Path with explicitly given coefficients (steps * modes, step-major in
/// the spectrum's mode order), e.g. for replaying recorded increments.
NoisePath make_noise_path(const KLSpectrum& spectrum, const TimeGrid& time_grid,
                          std::vector<double> coefficients);

/// Partial truncation tail sum_{K < |k| <= cap} q_k, a lower bound of the
/// full tail. Throws for cap <= K.
double truncation_tail(int K, double delta, int cap);

/// Spectrum dump: CSV `k1,k2,q`.
void write_spectrum_csv(const KLSpectrum& spectrum, std::ostream& os);

}  // namespace ddspde
