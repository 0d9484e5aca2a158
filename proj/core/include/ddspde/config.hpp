#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddspde {

enum class Experiment { Exp1, Exp2, Custom };

/// Base problem for custom runs.
enum class CustomProblem { Exp1, Exp2, Heat };

/// Validated run configuration. Defaults select the full experiment
/// setup (grid 127, K 128, delta 0.001, 4 strips, overlap 0.1,
/// 50 samples, h in {2^-4..2^-8} against h_ref = 2^-10).
struct RunConfig {
    Experiment experiment = Experiment::Exp1;
    CustomProblem problem = CustomProblem::Exp1;  // used when experiment=custom
    int grid_n = 127;
    int k_max = 128;
    double delta = 0.001;
    int strips = 4;
    double overlap = 0.1;
    std::vector<double> h_list = {0.0625, 0.03125, 0.015625, 0.0078125,
                                  0.00390625};
    double h_ref = 0.0009765625;
    int samples = 50;
    std::uint64_t seed = 0x5eed2024;
    std::string out_dir = ".";
    double t_final = 1.0;  // settable for custom runs only
    bool dump_partition = false;
    int dump_fields_every = 0;  // 0 = off
    bool moment_study = false;

    bool operator==(const RunConfig&) const = default;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses a flat `key=value` config file (`#` comments, blank lines
/// allowed). Unknown keys are rejected. Throws ConfigError with a message
/// naming the offending key and constraint.
RunConfig parse_config_file(const std::string& path);

/// Applies key=value overrides (e.g. from command-line flags) on top of a
/// base config, then validates.
RunConfig apply_overrides(RunConfig base,
                          const std::map<std::string, std::string>& overrides);

/// Builds a config from overrides alone (defaults + overrides).
RunConfig parse_config(const std::map<std::string, std::string>& overrides);

/// Canonical key=value serialization; parse_config over a parsed dump of
/// serialize_config(cfg) reproduces cfg.
std::string serialize_config(const RunConfig& cfg);

/// Full validation of every numeric field against the preconditions of the
/// operations it feeds. Throws ConfigError naming key and constraint.
void validate(const RunConfig& cfg);

/// Seed literal: decimal or 0x-prefixed hex.
std::uint64_t parse_seed(const std::string& text);

/// Step-size literal: plain decimal or the dyadic form `2^-k`.
double parse_step(const std::string& text);

/// Comma-separated list of step sizes, sorted decreasing.
std::vector<double> parse_step_list(const std::string& text);

}  // namespace ddspde
