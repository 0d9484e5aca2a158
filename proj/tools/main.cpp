// Command-line front end: strong-error and moment studies plus CSV dumps
// of the partition weights and the noise spectrum.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ddspde/config.hpp"
#include "ddspde/runner.hpp"

namespace {

struct StudyFlags {
    std::string config_file;
    std::map<std::string, std::string> overrides;
};

void add_override_option(CLI::App* cmd, StudyFlags& flags, const std::string& flag,
                         const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
           flag, [&flags, key](const std::string& v) { flags.overrides[key] = v; },
           help)
        ->type_name("TEXT");
}

void add_study_options(CLI::App* cmd, StudyFlags& flags) {
    cmd->add_option("--config", flags.config_file,
                    "key=value config file; flags override file values");
    add_override_option(cmd, flags, "--experiment", "experiment",
                        "exp1|exp2|custom (default exp1)");
    add_override_option(cmd, flags, "--problem", "problem",
                        "base problem for custom runs: exp1|exp2|heat");
    add_override_option(cmd, flags, "--grid", "grid", "interior nodes per dimension");
    add_override_option(cmd, flags, "--kmax", "kmax", "noise truncation K");
    add_override_option(cmd, flags, "--delta", "delta", "spectrum regularization");
    add_override_option(cmd, flags, "--strips", "strips", "subdomain count s");
    add_override_option(cmd, flags, "--overlap", "overlap", "strip overlap width");
    add_override_option(cmd, flags, "--h-list", "h_list",
                        "comma-separated step sizes (decimal or 2^-k)");
    add_override_option(cmd, flags, "--h-ref", "h_ref", "reference step size");
    add_override_option(cmd, flags, "--samples", "samples", "Monte Carlo samples");
    add_override_option(cmd, flags, "--seed", "seed", "decimal or 0x-hex seed");
    add_override_option(cmd, flags, "--out", "out", "output directory");
    add_override_option(cmd, flags, "--t-final", "t_final",
                        "final time (custom runs)");
    cmd->add_flag_function(
        "--dump-partition",
        [&flags](std::int64_t) { flags.overrides["dump_partition"] = "1"; },
        "also write partition.csv");
    add_override_option(cmd, flags, "--dump-fields-every", "dump_fields_every",
                        "snapshot every m-th step of one trajectory");
    cmd->add_flag_function(
        "--moment-study",
        [&flags](std::int64_t) { flags.overrides["moment_study"] = "1"; },
        "run the moment study instead of the error study");
}

ddspde::RunConfig build_config(const StudyFlags& flags) {
    ddspde::RunConfig base;
    if (!flags.config_file.empty()) {
        base = ddspde::parse_config_file(flags.config_file);
    }
    return ddspde::apply_overrides(base, flags.overrides);
}

int write_dump(const std::string& out,
               const std::function<void(std::ostream&)>& writer) {
    if (out.empty() || out == "-") {
        writer(std::cout);
        return 0;
    }
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) {
        std::cerr << "error: cannot open " << out << "\n";
        return 1;
    }
    writer(os);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Domain-decomposition IMEX-Euler-Maruyama solver for 2-D "
                 "stochastic heat equations"};
    app.require_subcommand(1);

    StudyFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "run the configured study");
    add_study_options(run_cmd, run_flags);

    StudyFlags moments_flags;
    CLI::App* moments_cmd =
        app.add_subcommand("moments", "run the moment study");
    add_study_options(moments_cmd, moments_flags);

    CLI::App* partition_cmd = app.add_subcommand("partition", "partition utilities");
    int part_grid = 127, part_strips = 4;
    double part_overlap = 0.1;
    std::string part_out = "-";
    CLI::App* partition_dump =
        partition_cmd->add_subcommand("dump", "write CSV x1,chi_1,...,chi_s");
    partition_dump->add_option("--grid", part_grid, "interior nodes per dimension");
    partition_dump->add_option("--strips", part_strips, "subdomain count s");
    partition_dump->add_option("--overlap", part_overlap, "strip overlap width");
    partition_dump->add_option("--out", part_out, "output file, - for stdout");
    partition_cmd->require_subcommand(1);

    CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "spectrum utilities");
    int spec_grid = 127, spec_kmax = 128;
    double spec_delta = 0.001;
    std::string spec_out = "-";
    CLI::App* spectrum_dump =
        spectrum_cmd->add_subcommand("dump", "write CSV k1,k2,q");
    spectrum_dump->add_option("--grid", spec_grid, "interior nodes per dimension");
    spectrum_dump->add_option("--kmax", spec_kmax, "noise truncation K");
    spectrum_dump->add_option("--delta", spec_delta, "spectrum regularization");
    spectrum_dump->add_option("--out", spec_out, "output file, - for stdout");
    spectrum_cmd->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed() || moments_cmd->parsed()) {
            StudyFlags& flags = run_cmd->parsed() ? run_flags : moments_flags;
            if (moments_cmd->parsed()) flags.overrides["moment_study"] = "1";
            const ddspde::RunConfig cfg = build_config(flags);
            return ddspde::run(cfg, std::cout, std::cerr);
        }
        if (partition_dump->parsed()) {
            return write_dump(part_out, [&](std::ostream& os) {
                ddspde::dump_partition(part_grid, part_strips, part_overlap, os);
            });
        }
        if (spectrum_dump->parsed()) {
            return write_dump(spec_out, [&](std::ostream& os) {
                ddspde::dump_spectrum(spec_grid, spec_kmax, spec_delta, os);
            });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
