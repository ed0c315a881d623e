#include "r2ch/invariants.hpp"

namespace r2ch {

namespace {

double rho_shift_sq(const State& s) {
    double acc = 0.0;
    for (double r : s.rho.v) acc += (r - 1.0) * (r - 1.0);
    return s.rho.grid.h * acc;
}

}  // namespace

double energy(const State& s, const PhysParams& p) {
    return 0.5 * (inner(s.u, s.u) + inner_grad(s.u, s.u) + p.rho_weight() * inner(s.rho, s.rho));
}

double energy_shifted(const State& s, const PhysParams& p) {
    return 0.5 * (inner(s.u, s.u) + inner_grad(s.u, s.u) + p.rho_weight() * rho_shift_sq(s));
}

double momentum(const State& s, const PhysParams& p) {
    double su = 0.0;
    for (double x : s.u.v) su += x;
    return s.u.grid.h * su + p.omega * inner(s.rho, s.rho);
}

double momentum_shifted(const State& s, const PhysParams& p) {
    double su = 0.0;
    for (double x : s.u.v) su += x;
    return s.u.grid.h * su + p.omega * rho_shift_sq(s);
}

double mass(const State& s) {
    double acc = 0.0;
    for (double r : s.rho.v) acc += r;
    return s.rho.grid.h * acc;
}

InvariantSample sample_invariants(const State& s, const PhysParams& p, int picard_iters) {
    return InvariantSample{s.t,
                           energy(s, p),
                           momentum(s, p),
                           mass(s),
                           energy_shifted(s, p),
                           momentum_shifted(s, p),
                           picard_iters};
}

}  // namespace r2ch
