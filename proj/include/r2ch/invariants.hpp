#pragma once

#include "r2ch/scheme.hpp"

namespace r2ch {

// E = (|u|^2 + |u_x|^2 + (1 - 2*omega*kappa)|rho|^2) / 2.
double energy(const State& s, const PhysParams& p);
double energy_shifted(const State& s, const PhysParams& p);

// H = (u, 1) + omega |rho|^2.
double momentum(const State& s, const PhysParams& p);
double momentum_shifted(const State& s, const PhysParams& p);

// I = (rho, 1).
double mass(const State& s);

InvariantSample sample_invariants(const State& s, const PhysParams& p, int picard_iters = 0);

}  // namespace r2ch
