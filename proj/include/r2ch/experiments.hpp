#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "r2ch/scheme.hpp"

namespace r2ch {

enum class InitKind { dam_break, peakon_pair };

// A named benchmark setup: initial condition, domain, horizon, coefficients,
// and the default discretization it is usually run at.
struct CasePreset {
    std::string name;
    InitKind init = InitKind::dam_break;
    double a = 0.0;       // dam-break width parameter (unused for the peakon pair)
    double x_left = 0.0;
    double L = 1.0;
    double T = 1.0;
    PhysParams params;
    double default_h = 0.1;
    double default_tau = 0.01;
    std::vector<double> snapshot_times;
};

// Catalog of the dam-break cases exA51..exF51 and the peakon-interaction
// cases exA52..exE52.
const std::vector<CasePreset>& case_catalog();
const CasePreset* find_case(std::string_view name);

// u = 0, rho = 1 + tanh(x + a) - tanh(x - a): a fluid column of width 2a at rest.
State init_dam_break(double a, const GridSpec& grid);

// u = exp(-|x-5|) - exp(-|x+5|), rho = 0.5: a peakon and an anti-peakon set to
// collide at the origin.
State init_peakon_antipeakon(const GridSpec& grid);

State initial_state(const CasePreset& cs, const GridSpec& grid);

struct RefineErrors {
    double err_u_inf;
    double err_rho_l2;
};

// Grid-doubling error: coarse node i against fine node 2i, max over all stored
// levels. err_u_inf is the max-norm difference of u; err_rho_l2 the largest
// weighted l2 difference of rho. Both trajectories need full field history.
RefineErrors refine_error_space(const Trajectory& coarse, const Trajectory& fine);

// Step-doubling analog: coarse level k against fine level 2k on one grid.
RefineErrors refine_error_time(const Trajectory& coarse, const Trajectory& fine);

// log2(err_coarse / err_fine); both inputs must be positive.
double convergence_order(double err_coarse, double err_fine);

struct ConvergenceRow {
    double step = 0.0;  // h or tau
    double err_u_inf = 0.0;
    std::optional<double> ord_u;
    double err_rho_l2 = 0.0;
    std::optional<double> ord_rho;
    bool degenerate = false;  // errors vanished; orders undefined
};

enum class Axis { space, time };

// A study aborted mid-flight; `completed` holds the rows whose runs finished.
class StudyError : public std::runtime_error {
  public:
    StudyError(const std::string& what, std::vector<ConvergenceRow> completed_)
        : std::runtime_error(what), completed(std::move(completed_)) {}
    std::vector<ConvergenceRow> completed;
};

// Run the case at `levels` successively halved steps along one axis (the other
// held fixed), pairing adjacent resolutions. Rows carry the coarse step of each
// pair; order entries are empty on the first row. `jobs` > 1 fans the
// independent runs out to a worker pool; results are identical either way.
std::vector<ConvergenceRow> run_convergence_study(const CasePreset& cs, Axis axis, int levels,
                                                  double base_h, double base_tau,
                                                  const SolverCfg& cfg, int jobs = 1);

// Largest odd-symmetry defect of u about x = 0 over the trajectory's stored
// levels. The grid must be symmetric about the origin (x_left = -L/2, M even).
double symmetry_probe(const Trajectory& traj);

}  // namespace r2ch
