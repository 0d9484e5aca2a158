#include "ddspde/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "ddspde/experiments.hpp"
#include "ddspde/rng.hpp"

namespace ddspde {

namespace {

namespace fs = std::filesystem;

ProblemSpec heat_problem(double t_final) {
    ProblemSpec prob;
    prob.alpha = [](double) { return 1.0; };
    prob.f_tilde = [](double, double, double, double) { return 0.0; };
    prob.g_tilde = [](double, double, double) { return 0.0; };
    prob.b_tilde = [](double, double, double, double) { return 0.0; };
    prob.u0 = [](double x1, double x2) {
        return 2.0 * std::sin(std::numbers::pi * x1) * std::sin(std::numbers::pi * x2);
    };
    prob.final_time = t_final;
    return prob;
}

ProblemSpec problem_for(const RunConfig& cfg) {
    if (cfg.experiment == Experiment::Exp1) return experiment1_spec();
    if (cfg.experiment == Experiment::Exp2) return experiment2_spec();
    ProblemSpec prob;
    switch (cfg.problem) {
        case CustomProblem::Exp1: prob = experiment1_spec(); break;
        case CustomProblem::Exp2: prob = experiment2_spec(); break;
        case CustomProblem::Heat: prob = heat_problem(cfg.t_final); break;
    }
    prob.final_time = cfg.t_final;
    return prob;
}

/// Tracks files written by one run so failures can clean up after themselves.
class OutputSet {
public:
    explicit OutputSet(const fs::path& dir) : dir_(dir) {}

    std::ofstream open(const std::string& name) {
        fs::create_directories(dir_);
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open output file " + path.string());
        }
        written_.push_back(path);
        return out;
    }

    void write_text(const std::string& name, const std::string& text) {
        auto out = open(name);
        out << text;
        if (!out) {
            throw std::runtime_error("failed writing output file " + name);
        }
    }

    void discard_all() {
        for (const fs::path& path : written_) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        written_.clear();
    }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

int run_impl(const RunConfig& cfg, std::ostream& out, OutputSet& outputs) {
    const Grid2D grid = build_grid(cfg.grid_n);
    const PartitionOfUnity partition =
        build_strip_partition(grid, cfg.strips, cfg.overlap);
    const KLSpectrum spectrum = build_spectrum(cfg.k_max, cfg.delta, grid);
    const StepperConfig stepper_cfg(
        partition, std::vector<int>(cfg.strips, cfg.k_max));
    const ProblemSpec prob = problem_for(cfg);

    if (cfg.dump_partition) {
        auto os = outputs.open("partition.csv");
        write_partition_csv(partition, os);
        out << "wrote partition.csv\n";
    }

    if (cfg.dump_fields_every > 0) {
        // One illustrative trajectory of the configured scheme at the
        // coarsest requested step size, snapshotting every m-th state.
        const double h = cfg.h_list.front();
        const int steps = static_cast<int>(std::llround(prob.final_time / h));
        const TimeGrid tg = make_uniform_time_grid(prob.final_time, steps);
        const NoisePath path = sample_path(spectrum, tg, derive_stream(cfg.seed, 0));
        int dumped = 0;
        integrate(stepper_cfg, prob, tg, path, false,
                  [&](int n, double, const ScalarField& U) {
                      if (n % cfg.dump_fields_every != 0) return;
                      char name[48];
                      std::snprintf(name, sizeof(name), "field_step_%04d.csv", n);
                      auto os = outputs.open(name);
                      write_field_csv(U, os);
                      ++dumped;
                  });
        out << "wrote " << dumped << " field snapshots\n";
    }

    if (cfg.moment_study) {
        const MomentTable table = moment_study(prob, stepper_cfg, spectrum,
                                               cfg.h_list, cfg.samples, cfg.seed);
        std::ostringstream csv;
        write_moment_table_csv(table, csv);
        outputs.write_text("moments.csv", csv.str());
        out << "wrote moments.csv\n";
        double lo = table.rows.front().max_moment, hi = lo;
        for (const MomentRow& row : table.rows) {
            lo = std::min(lo, row.max_moment);
            hi = std::max(hi, row.max_moment);
        }
        char line[128];
        std::snprintf(line, sizeof(line),
                      "max moment across h: [%.6g, %.6g], spread factor %.3f\n", lo,
                      hi, lo > 0.0 ? hi / lo : 0.0);
        out << line;
        return 0;
    }

    const ErrorTable table = strong_error_study(
        prob, stepper_cfg, spectrum, cfg.h_list, cfg.h_ref, cfg.samples, cfg.seed);
    const ErrorTable fit_rows =
        rows_above_floor(table, 100.0 * stepper_cfg.solver_tol());
    std::optional<FitResult> fit;
    if (fit_rows.rows.size() >= 3) fit = fit_order(fit_rows);

    outputs.write_text("error_table.csv", error_table_csv(table, fit));
    out << "wrote error_table.csv\n";
    if (fit) {
        char line[128];
        std::snprintf(line, sizeof(line), "fitted slope = %.4f +- %.4f (intercept %.4f)\n",
                      fit->slope, fit->residual, fit->intercept);
        out << line;
    } else {
        out << "too few rows above the error floor for a slope fit\n";
    }
    return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    OutputSet outputs(cfg.out_dir);
    try {
        validate(cfg);
        return run_impl(cfg, out, outputs);
    } catch (const std::exception& e) {
        outputs.discard_all();
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

void dump_partition(int grid_n, int strips, double overlap, std::ostream& os) {
    const Grid2D grid = build_grid(grid_n);
    write_partition_csv(build_strip_partition(grid, strips, overlap), os);
}

void dump_spectrum(int grid_n, int k_max, double delta, std::ostream& os) {
    const Grid2D grid = build_grid(grid_n);
    write_spectrum_csv(build_spectrum(k_max, delta, grid), os);
}

}  // namespace ddspde
