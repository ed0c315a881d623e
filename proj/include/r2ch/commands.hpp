#pragma once

#include <ostream>
#include <string>

#include "r2ch/config.hpp"

namespace r2ch {

// Exit statuses shared by the commands and the executable wrapping them.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime failure (step error, I/O)
inline constexpr int kExitUsage = 2;    // bad invocation or config

// March the configured case and write invariants.csv plus one snapshot CSV per
// requested time into cfg.out_dir. `invariants_only` suppresses the snapshots.
// Prints a one-line summary. Returns an exit status.
int cmd_run(const RunConfig& cfg, bool invariants_only = false, bool gnuplot_script = false);

// Grid-refinement study along one axis; writes orders_space.csv or
// orders_time.csv. A failing level still writes the completed rows and returns
// kExitFailure.
int cmd_converge(const RunConfig& cfg, Axis axis, int levels, int jobs = 1,
                 bool gnuplot_script = false);

// Randomized check of the discrete summation-by-parts identities and the
// two-level product rule; prints one verdict line per identity.
int cmd_selftest(std::ostream& out);

}  // namespace r2ch
