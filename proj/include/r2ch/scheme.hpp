#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "r2ch/cyclic_band.hpp"
#include "r2ch/grid.hpp"
#include "r2ch/grid_ops.hpp"

namespace r2ch {

// Physical coefficients: kappa (underlying shear flow), sigma (nonlinear
// balance, > 0), mu (dispersion), omega (rotation frequency).
struct PhysParams {
    double kappa = 0.0;
    double sigma = 1.0;
    double mu = 0.0;
    double omega = 0.0;

    PhysParams() = default;
    PhysParams(double kappa_, double sigma_, double mu_, double omega_)
        : kappa(kappa_), sigma(sigma_), mu(mu_), omega(omega_) {
        validate();
    }

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("PhysParams: sigma must be positive");
        if (!(omega >= 0.0 && omega < 0.25))
            throw std::invalid_argument("PhysParams: omega must lie in [0, 1/4)");
        if (!(rho_weight() > 0.0))
            throw std::invalid_argument("PhysParams: 1 - 2*omega*kappa must be positive");
    }

    // The coefficient 1 - 2*omega*kappa weighting the surface-elevation energy.
    double rho_weight() const { return 1.0 - 2.0 * omega * kappa; }

    bool operator==(const PhysParams&) const = default;
};

// Uniform partition of [0, T] into N steps of size tau = T/N.
struct TimeGrid {
    double T = 1.0;
    int N = 1;
    double tau = 1.0;

    static TimeGrid with_steps(double T, int N) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (N < 1) throw std::invalid_argument("TimeGrid: need at least one step");
        return TimeGrid{T, N, T / N};
    }
    static TimeGrid with_tau(double T, double tau_requested) {
        if (!(tau_requested > 0.0)) throw std::invalid_argument("TimeGrid: step must be positive");
        int n = static_cast<int>(std::lround(T / tau_requested));
        return with_steps(T, n < 1 ? 1 : n);
    }

    bool operator==(const TimeGrid&) const = default;
};

// Velocity and surface elevation on one grid at one time.
struct State {
    GridFn u;
    GridFn rho;
    double t = 0.0;

    State() = default;
    State(GridFn u_, GridFn rho_, double t_) : u(std::move(u_)), rho(std::move(rho_)), t(t_) {
        require_same_grid(u, rho, "State");
    }
};

struct SolverCfg {
    double picard_tol = 1e-12;
    int max_picard_iters = 100;
    double newton_tol = 1e-12;
    int max_newton_iters = 25;
};

// A step's iteration failed to converge within its budget.
class StepError : public std::runtime_error {
  public:
    StepError(const std::string& what, double last_increment_)
        : std::runtime_error(what), last_increment(last_increment_) {}
    double last_increment;
};

// A run aborted; step_index is the failing step (1-based).
class RunError : public std::runtime_error {
  public:
    RunError(const std::string& what, int step_index_)
        : std::runtime_error(what), step_index(step_index_) {}
    int step_index;
};

// The 2M x 2M linear system of one fixed-point sweep: unknowns are the new
// midpoint iterate, interleaved (u_0, rho_0, u_1, rho_1, ...). `prev` holds the
// accepted time level, `iterate` the current sweep's lagged fields.
CyclicBandSystem assemble_picard_system(const State& prev, const State& iterate,
                                        const PhysParams& p, double tau);

struct PicardResult {
    State next;
    int iters;  // number of linear solves performed
};

// One implicit midpoint step: iterate the linearized system from the previous
// level until the sweep-to-sweep increment drops to cfg.picard_tol in max norm,
// then extrapolate the midpoint to the new level. Negative tau steps backward.
PicardResult picard_step(const State& prev, const PhysParams& p, double tau, const SolverCfg& cfg);

// Same step solved by Newton's method on the nonlinear midpoint equations with
// an analytic Jacobian; the independent cross-check for picard_step.
State newton_step(const State& prev, const PhysParams& p, double tau, const SolverCfg& cfg);

// Midpoint residual of the nonlinear scheme; 2M entries interleaved like the
// unknown vector. Used by newton_step and by tests.
std::vector<double> midpoint_residual(const State& prev, const GridFn& u_mid, const GridFn& rho_mid,
                                      const PhysParams& p, double tau);

// Analytic Jacobian of midpoint_residual with respect to (u_mid, rho_mid).
CyclicBandSystem midpoint_jacobian(const State& prev, const GridFn& u_mid, const GridFn& rho_mid,
                                   const PhysParams& p, double tau);

struct UniquenessWarning {
    double t = 0.0;
    double ratio = 0.0;  // tau * |u|_inf / (2h)
};

// The elevation update is uniquely solvable while tau*|u|_inf/(2h) < 1; returns
// a warning carrying the ratio and time stamp once that margin is lost.
std::optional<UniquenessWarning> uniqueness_guard(const GridFn& u_mid, double tau, double t = 0.0);

// Conserved quantities of the midpoint scheme at one time level. E, H, I are
// the raw forms the benchmark tables use; the _shift variants subtract the
// rest elevation rho = 1 and differ from the raw forms by grid constants only.
struct InvariantSample {
    double t = 0.0;
    double E = 0.0;
    double H = 0.0;
    double I = 0.0;
    double E_shift = 0.0;
    double H_shift = 0.0;
    int picard_iters = 0;
};

struct StepRecord {
    int step;  // 1-based index of the step that just completed
    const State& prev;
    const State& next;
    int picard_iters;
};

struct RunOptions {
    bool record_invariants = true;
    bool record_history = false;          // keep every level (refinement studies)
    std::vector<double> snapshot_times;   // states captured at the nearest step
    bool warn_uniqueness = true;
    std::vector<std::function<void(const StepRecord&)>> observers;  // synchronous, in order
};

struct Trajectory {
    PhysParams params;
    TimeGrid time;
    std::vector<InvariantSample> invariants;        // per level, including t = 0
    std::vector<State> history;                     // levels 0..N when recorded
    std::vector<std::pair<double, State>> snapshots;  // (requested time, state)
    std::vector<UniquenessWarning> warnings;
    State final_state;
    int max_picard_iters = 0;
    long total_picard_iters = 0;
};

// March init through tg.N midpoint steps, invoking recorders and observers
// after each one. Any step failure is rethrown as RunError with the step index.
Trajectory run(const State& init, const PhysParams& p, const TimeGrid& tg, const SolverCfg& cfg,
               const RunOptions& opts = {});

}  // namespace r2ch
