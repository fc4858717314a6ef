#pragma once

#include <ostream>

namespace morl {

enum class CliCommand { run, train_offline, sweep_phi, compare_metrics, compare_distances, compare_algos, plot, export_ccs };

/// Command-line entry point. Exit status: 0 success, 1 configuration
/// error (bad flag, config, or missing frozen set), 2 runtime error.
int parse_and_dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace morl
