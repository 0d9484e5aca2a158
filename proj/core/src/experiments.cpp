#include "ddspde/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "ddspde/rng.hpp"

namespace ddspde {

namespace {

int steps_for(double h, double T) {
    const int N = static_cast<int>(std::llround(T / h));
    if (N < 1 || std::abs(N * h - T) > 1e-9 * T) {
        throw std::invalid_argument("step size " + std::to_string(h) +
                                    " does not divide the final time " +
                                    std::to_string(T) + " into whole steps");
    }
    return N;
}

int refinement_for(double h, double h_ref) {
    const int r = static_cast<int>(std::llround(h / h_ref));
    if (r < 1 || std::abs(r * h_ref - h) > 1e-12) {
        throw std::invalid_argument("step size " + std::to_string(h) +
                                    " is not a whole multiple of h_ref = " +
                                    std::to_string(h_ref));
    }
    return r;
}

std::vector<double> sorted_decreasing(std::vector<double> h_list) {
    if (h_list.empty()) {
        throw std::invalid_argument("h_list must not be empty");
    }
    std::sort(h_list.begin(), h_list.end(), std::greater<>());
    for (double h : h_list) {
        if (!(h > 0.0)) throw std::invalid_argument("step sizes must be > 0");
    }
    return h_list;
}

/// Runs fn(m) for m in [0, count) on worker_count() threads. The first
/// exception is rethrown after all workers join.
void parallel_samples(int count, const std::function<void(int)>& fn) {
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int m = 0; m < count; ++m) fn(m);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const int m = next.fetch_add(1);
            if (m >= count) return;
            try {
                fn(m);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

StepperConfig unsplit_reference_config(const StepperConfig& cfg, int K_max) {
    return StepperConfig(build_strip_partition(cfg.partition().grid(), 1, 0.1),
                         {K_max}, cfg.solver_tol(), cfg.solver_max_iter());
}

StudyMetadata make_metadata(const StepperConfig& cfg, const KLSpectrum& spectrum,
                            std::uint64_t seed, double h_ref) {
    StudyMetadata meta;
    meta.grid_n = cfg.partition().grid().n_interior;
    meta.K = cfg.max_truncation();
    meta.delta = spectrum.delta();
    meta.subdomains = cfg.subdomains();
    meta.overlap = cfg.partition().overlap();
    meta.seed = seed;
    meta.h_ref = h_ref;
    return meta;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Shortest representation that parses back exactly.
std::string fmt_shortest(double v) {
    char buf[40];
    const auto result = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, result.ptr);
}

void write_metadata(const StudyMetadata& meta, std::ostream& os) {
    os << "# grid=" << meta.grid_n << "\n";
    os << "# K=" << meta.K << "\n";
    os << "# delta=" << fmt_shortest(meta.delta) << "\n";
    os << "# s=" << meta.subdomains << "\n";
    os << "# overlap=" << fmt_shortest(meta.overlap) << "\n";
    os << "# seed=" << meta.seed << "\n";
    os << "# h_ref=" << fmt_shortest(meta.h_ref) << "\n";
}

}  // namespace

int worker_count() {
    const char* env = std::getenv("DDSPDE_THREADS");
    if (env != nullptr) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && parsed > 0) {
            return static_cast<int>(parsed);
        }
        // 0 or malformed falls through to auto.
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

ErrorTable strong_error_study(const ProblemSpec& prob, const StepperConfig& cfg,
                              const KLSpectrum& spectrum,
                              const std::vector<double>& h_list_in, double h_ref,
                              int samples, std::uint64_t seed) {
    if (samples < 2) {
        throw std::invalid_argument("strong_error_study: need at least 2 samples");
    }
    const double T = prob.final_time;
    const std::vector<double> h_list = sorted_decreasing(h_list_in);
    const int ref_steps = steps_for(h_ref, T);
    std::vector<int> refinements;
    for (double h : h_list) {
        steps_for(h, T);
        refinements.push_back(refinement_for(h, h_ref));
    }

    const TimeGrid ref_grid = make_uniform_time_grid(T, ref_steps);
    const StepperConfig ref_cfg =
        unsplit_reference_config(cfg, spectrum.truncation());

    // sq_err[h index][sample index]
    std::vector<std::vector<double>> sq_err(
        h_list.size(), std::vector<double>(samples, 0.0));

    parallel_samples(samples, [&](int m) {
        const NoisePath fine =
            sample_path(spectrum, ref_grid, derive_stream(seed, m));
        const ScalarField U_ref =
            integrate(ref_cfg, prob, ref_grid, fine).final_state;
        for (std::size_t j = 0; j < h_list.size(); ++j) {
            const NoisePath coarse = aggregate_to_coarse(fine, refinements[j]);
            const ScalarField U =
                integrate(cfg, prob, coarse.time_grid(), coarse).final_state;
            double acc = 0.0;
            const auto uv = U.values();
            const auto rv = U_ref.values();
            for (std::size_t i = 0; i < uv.size(); ++i) {
                const double d = uv[i] - rv[i];
                acc += d * d;
            }
            const double h_sp = U.grid().spacing;
            sq_err[j][m] = h_sp * h_sp * acc;
        }
    });

    ErrorTable table;
    table.meta = make_metadata(cfg, spectrum, seed, h_ref);
    for (std::size_t j = 0; j < h_list.size(); ++j) {
        double mean = 0.0;
        for (double e : sq_err[j]) mean += e;  // fixed-order reduction
        mean /= samples;
        double var = 0.0;
        for (double e : sq_err[j]) var += (e - mean) * (e - mean);
        var /= samples - 1;
        const double se_mean = std::sqrt(var / samples);
        const double rms = std::sqrt(mean);
        const double se_rms = rms > 0.0 ? se_mean / (2.0 * rms) : 0.0;
        table.rows.push_back(ErrorRow{h_list[j], rms, se_rms, samples});
    }
    return table;
}

MomentTable moment_study(const ProblemSpec& prob, const StepperConfig& cfg,
                         const KLSpectrum& spectrum,
                         const std::vector<double>& h_list_in, int samples,
                         std::uint64_t seed) {
    if (samples < 2) {
        throw std::invalid_argument("moment_study: need at least 2 samples");
    }
    const double T = prob.final_time;
    const std::vector<double> h_list = sorted_decreasing(h_list_in);
    const double h_fine = h_list.back();
    const int fine_steps = steps_for(h_fine, T);
    std::vector<int> refinements;
    for (double h : h_list) {
        steps_for(h, T);
        refinements.push_back(refinement_for(h, h_fine));
    }
    const TimeGrid fine_grid = make_uniform_time_grid(T, fine_steps);

    // moments[h index][sample index][step index]
    std::vector<std::vector<std::vector<double>>> moments(
        h_list.size(), std::vector<std::vector<double>>(samples));

    parallel_samples(samples, [&](int m) {
        const NoisePath fine =
            sample_path(spectrum, fine_grid, derive_stream(seed, m));
        for (std::size_t j = 0; j < h_list.size(); ++j) {
            const NoisePath coarse = aggregate_to_coarse(fine, refinements[j]);
            moments[j][m] =
                integrate(cfg, prob, coarse.time_grid(), coarse, true).moments;
        }
    });

    MomentTable table;
    table.meta = make_metadata(cfg, spectrum, seed, h_fine);
    for (std::size_t j = 0; j < h_list.size(); ++j) {
        const std::size_t entries = moments[j][0].size();
        double best_mean = -1.0, best_se = 0.0;
        for (std::size_t i = 0; i < entries; ++i) {
            double mean = 0.0;
            for (int m = 0; m < samples; ++m) mean += moments[j][m][i];
            mean /= samples;
            if (mean > best_mean) {
                double var = 0.0;
                for (int m = 0; m < samples; ++m) {
                    const double d = moments[j][m][i] - mean;
                    var += d * d;
                }
                var /= samples - 1;
                best_mean = mean;
                best_se = std::sqrt(var / samples);
            }
        }
        table.rows.push_back(MomentRow{h_list[j], best_mean, best_se, samples});
    }
    return table;
}

FitResult fit_order(const ErrorTable& table) {
    if (table.rows.size() < 3) {
        throw std::invalid_argument("fit_order: need at least 3 rows, got " +
                                    std::to_string(table.rows.size()));
    }
    std::vector<double> lx, ly;
    for (const ErrorRow& row : table.rows) {
        if (!(row.rms_error > 0.0)) {
            throw std::invalid_argument(
                "fit_order: rms_error must be strictly positive (exclude "
                "self-comparison rows), got " +
                std::to_string(row.rms_error) + " at h = " + std::to_string(row.h));
        }
        lx.push_back(std::log(row.h));
        ly.push_back(std::log(row.rms_error));
    }
    const std::size_t n = lx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

ErrorTable rows_above_floor(const ErrorTable& table, double error_floor) {
    ErrorTable filtered;
    filtered.meta = table.meta;
    for (const ErrorRow& row : table.rows) {
        if (row.rms_error >= error_floor) filtered.rows.push_back(row);
    }
    return filtered;
}

ProblemSpec experiment1_spec() {
    ProblemSpec prob;
    prob.alpha = [](double t) { return 0.1 * (1.0 + std::exp(-t)); };
    prob.f_tilde = [](double, double, double, double u) { return std::sin(u); };
    prob.g_tilde = [](double, double, double) { return 0.0; };
    prob.b_tilde = [](double, double, double, double) { return 1.0; };
    prob.u0 = [](double x1, double x2) {
        const double p1 = x1 * x1 * (x1 - 1.0) * (x1 - 1.0) * (x1 - 1.0);
        const double p2 = x2 * x2 * (x2 - 1.0) * (x2 - 1.0) * (x2 - 1.0);
        return 5.0 * p1 * p2;
    };
    prob.final_time = 1.0;
    return prob;
}

ProblemSpec experiment2_spec() {
    ProblemSpec prob;
    prob.alpha = [](double) { return 0.1; };
    prob.f_tilde = [](double t, double x1, double x2, double) {
        return (3.0 * std::sin(5.0 * x1) + 2.0 * std::cos(7.0 * x2)) *
               (std::cos(t) + std::sin(4.0 * t));
    };
    prob.g_tilde = [](double, double, double) { return 0.0; };
    prob.b_tilde = [](double, double, double, double u) { return u; };
    prob.u0 = experiment1_spec().u0;
    prob.final_time = 1.0;
    return prob;
}

void write_error_table_csv(const ErrorTable& table, std::ostream& os,
                           const std::optional<FitResult>& fit) {
    write_metadata(table.meta, os);
    os << "h,rms_error,stderr,samples\n";
    for (const ErrorRow& row : table.rows) {
        os << fmt17(row.h) << ',' << fmt17(row.rms_error) << ','
           << fmt17(row.stderr_rms) << ',' << row.samples << "\n";
    }
    if (fit) {
        os << "# slope=" << fmt17(fit->slope) << " intercept=" << fmt17(fit->intercept)
           << " residual=" << fmt17(fit->residual) << "\n";
    }
}

std::string error_table_csv(const ErrorTable& table,
                            const std::optional<FitResult>& fit) {
    std::ostringstream os;
    write_error_table_csv(table, os, fit);
    return os.str();
}

void write_moment_table_csv(const MomentTable& table, std::ostream& os) {
    write_metadata(table.meta, os);
    os << "h,max_moment,stderr,samples\n";
    for (const MomentRow& row : table.rows) {
        os << fmt17(row.h) << ',' << fmt17(row.max_moment) << ','
           << fmt17(row.stderr_mean) << ',' << row.samples << "\n";
    }
}

}  // namespace ddspde
