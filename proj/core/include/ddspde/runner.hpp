#pragma once

#include <iosfwd>

#include "ddspde/config.hpp"

namespace ddspde {

/// Executes the configured study end to end: builds grid, partition and
/// spectrum, runs the strong-error or moment study, writes the CSV
/// artifacts into cfg.out_dir and prints a short summary to `out`.
/// Returns 0 on success, nonzero after printing a diagnostic to `err`;
/// partially written output files are removed on failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// `partition dump` subcommand body: writes the partition CSV to `os`.
void dump_partition(int grid_n, int strips, double overlap, std::ostream& os);

/// `spectrum dump` subcommand body: writes the spectrum CSV to `os`.
void dump_spectrum(int grid_n, int k_max, double delta, std::ostream& os);

}  // namespace ddspde
