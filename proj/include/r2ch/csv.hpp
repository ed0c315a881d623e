#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "r2ch/experiments.hpp"

namespace r2ch {

// Shortest decimal string that parses back to exactly `x`. Keeps golden files
// stable across runs while losing no precision.
std::string format_double(double x);

// Header `t,E,H,I,E_shift,H_shift,picard_iters`, one row per sample.
void write_invariants_csv(std::ostream& out, const std::vector<InvariantSample>& samples);

// Header `x,u,rho`, one row per grid node.
void write_snapshot_csv(std::ostream& out, const State& s);

// Header `step,err_u_inf,ord_u,err_rho_l2,ord_rho`. Missing orders (first row,
// degenerate rows) are emitted as empty fields.
void write_orders_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

// "snapshot_t<t>.csv" with <t> in shortest round-trip form.
std::string snapshot_filename(double t);

}  // namespace r2ch
