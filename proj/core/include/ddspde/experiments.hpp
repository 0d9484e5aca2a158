#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ddspde/noise.hpp"
#include "ddspde/stepper.hpp"

namespace ddspde {

struct StudyMetadata {
    int grid_n = 0;
    int K = 0;
    double delta = 0.0;
    int subdomains = 0;
    double overlap = 0.0;
    std::uint64_t seed = 0;
    double h_ref = 0.0;
};

struct ErrorRow {
    double h = 0.0;
    double rms_error = 0.0;   // sqrt of the sample mean of ||U^N - U_ref||_H^2
    double stderr_rms = 0.0;  // standard error of that mean, propagated to the root
    int samples = 0;
};

/// Strong-error table, rows sorted by decreasing h.
struct ErrorTable {
    std::vector<ErrorRow> rows;
    StudyMetadata meta;
};

struct MomentRow {
    double h = 0.0;
    double max_moment = 0.0;  // max_n of the sample mean of ||U^n||_H^2
    double stderr_mean = 0.0;
    int samples = 0;
};

struct MomentTable {
    std::vector<MomentRow> rows;
    StudyMetadata meta;
};

/// Least-squares fit of log(rms_error) against log(h).
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of the log-log fit residuals
};

/// Coupled-path Monte Carlo estimate of the strong error at the final time.
/// Per sample m: one fine NoisePath at h_ref from stream (seed, m); the
/// reference solution by the unsplit scheme (s = 1, K = spectrum K) at
/// h_ref; then for every h the path is aggregated to step h and the
/// configured scheme is run on it. Requires every h in h_list and h_ref to
/// divide the final time into whole steps, every h to be a whole multiple
/// of h_ref, and M >= 2. Samples run concurrently (DDSPDE_THREADS caps the
/// workers); the accumulation is reduced in sample order, so results are
/// deterministic in (seed, config).
ErrorTable strong_error_study(const ProblemSpec& prob, const StepperConfig& cfg,
                              const KLSpectrum& spectrum,
                              const std::vector<double>& h_list, double h_ref,
                              int samples, std::uint64_t seed);

/// Monte Carlo estimate of max_n E||U^n||_H^2 per step size. Paths are
/// coupled across h by aggregation from the finest h in h_list.
MomentTable moment_study(const ProblemSpec& prob, const StepperConfig& cfg,
                         const KLSpectrum& spectrum,
                         const std::vector<double>& h_list, int samples,
                         std::uint64_t seed);

/// Ordinary least squares on >= 3 rows; throws std::invalid_argument when
/// rows are missing or any error is not strictly positive.
FitResult fit_order(const ErrorTable& table);

/// Rows safe to fit: rms_error >= error_floor (self-comparison rows and
/// solver noise excluded). Callers typically pass 100 * solver_tol.
ErrorTable rows_above_floor(const ErrorTable& table, double error_floor);

/// Semi-linear equation with additive noise:
/// u0 = 5 x1^2 (x1-1)^3 x2^2 (x2-1)^3, alpha(t) = 0.1 (1 + exp(-t)),
/// G = 0, F = sin(u), B = 1, T = 1.
ProblemSpec experiment1_spec();

/// Linear equation with multiplicative noise: same u0, alpha = 0.1, G = 0,
/// F = (3 sin(5 x1) + 2 cos(7 x2)) (cos(t) + sin(4 t)), B = u, T = 1.
ProblemSpec experiment2_spec();

/// ErrorTable CSV: `#`-prefixed metadata lines, header
/// `h,rms_error,stderr,samples`, 17 significant digits; the fit, when
/// present, is appended as `# slope=<v> intercept=<v> residual=<v>`.
void write_error_table_csv(const ErrorTable& table, std::ostream& os,
                           const std::optional<FitResult>& fit = std::nullopt);
std::string error_table_csv(const ErrorTable& table,
                            const std::optional<FitResult>& fit = std::nullopt);

/// Moment table CSV: metadata lines and header `h,max_moment,stderr,samples`.
void write_moment_table_csv(const MomentTable& table, std::ostream& os);

/// Worker count for sample-parallel studies: the DDSPDE_THREADS environment
/// variable caps concurrency, 0 or unset meaning auto (hardware threads).
int worker_count();

}  // namespace ddspde
