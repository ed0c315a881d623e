#include "r2ch/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace r2ch {

namespace {

constexpr double kOmegaEq = 73e-6;  // equatorial rotation frequency

std::vector<CasePreset> build_catalog() {
    const double pi = std::numbers::pi;
    std::vector<CasePreset> cat;
    // Dam-break cases. Defaults mirror the grids the invariant and long-time
    // benchmarks run at.
    cat.push_back({"exA51", InitKind::dam_break, 0.1, -6.0, 12.0, 20.0,
                   PhysParams(0.0, 1.0, 0.0, 0.0), 1.0 / 5, 1.0 / 256, {}});
    cat.push_back({"exB51", InitKind::dam_break, 4.0, -12 * pi, 24 * pi, 2.0,
                   PhysParams(0.0, 1.0, 0.0, 0.0), 1.0 / 5, 1.0 / 256, {}});
    cat.push_back({"exC51", InitKind::dam_break, 0.2, -8.0, 16.0, 1.0,
                   PhysParams(0.0, 1.0, 1.0, kOmegaEq), 1.0 / 10, 1.0 / 256, {}});
    cat.push_back({"exD51", InitKind::dam_break, 1.0, -8.0, 16.0, 1.0,
                   PhysParams(1.0, 1.0, 1.0, kOmegaEq), 1.0 / 5, 1.0 / 256, {}});
    cat.push_back({"exE51", InitKind::dam_break, 1.0, -12 * pi, 24 * pi, 50.0,
                   PhysParams(0.0, 1.0, 1.0, kOmegaEq), 1.0 / 16, 1.0 / 20, {}});
    cat.push_back({"exF51", InitKind::dam_break, 1.0, -100.0, 200.0, 1000.0,
                   PhysParams(1.0, 1.0, 1.0, kOmegaEq), 1.0 / 10, 1.0 / 50, {}});
    // Peakon/anti-peakon interaction cases.
    const std::vector<double> snaps{1.0, 3.0, 6.0, 8.0};
    cat.push_back({"exA52", InitKind::peakon_pair, 0.0, -20.0, 40.0, 8.0,
                   PhysParams(0.0, 1.0, 0.0, 0.0), 1.0 / 10, 1.0 / 100, snaps});
    cat.push_back({"exB52", InitKind::peakon_pair, 0.0, -20.0, 40.0, 8.0,
                   PhysParams(0.0, 1.0, 0.0, 0.2), 1.0 / 10, 1.0 / 100, snaps});
    cat.push_back({"exC52", InitKind::peakon_pair, 0.0, -20.0, 40.0, 8.0,
                   PhysParams(0.0, 1.0, 0.0, kOmegaEq), 1.0 / 10, 1.0 / 100, snaps});
    cat.push_back({"exD52", InitKind::peakon_pair, 0.0, -20.0, 40.0, 8.0,
                   PhysParams(1.0, 1.0, 0.0, kOmegaEq), 1.0 / 10, 1.0 / 100, snaps});
    cat.push_back({"exE52", InitKind::peakon_pair, 0.0, -20.0, 40.0, 8.0,
                   PhysParams(1.0, 1.0, 1.0, kOmegaEq), 1.0 / 10, 1.0 / 100, snaps});
    return cat;
}

void require_history(const Trajectory& t, const char* where) {
    if (t.history.empty())
        throw std::invalid_argument(std::string(where) + ": trajectory carries no field history");
}

}  // namespace

const std::vector<CasePreset>& case_catalog() {
    static const std::vector<CasePreset> cat = build_catalog();
    return cat;
}

const CasePreset* find_case(std::string_view name) {
    for (const CasePreset& c : case_catalog())
        if (c.name == name) return &c;
    return nullptr;
}

State init_dam_break(double a, const GridSpec& grid) {
    GridFn u(grid), rho(grid);
    for (int i = 0; i < grid.M; ++i) {
        const double x = grid.node(i);
        rho[i] = 1.0 + std::tanh(x + a) - std::tanh(x - a);
    }
    return State{std::move(u), std::move(rho), 0.0};
}

State init_peakon_antipeakon(const GridSpec& grid) {
    GridFn u(grid), rho(grid, 0.5);
    for (int i = 0; i < grid.M; ++i) {
        const double x = grid.node(i);
        u[i] = std::exp(-std::abs(x - 5.0)) - std::exp(-std::abs(x + 5.0));
    }
    return State{std::move(u), std::move(rho), 0.0};
}

State initial_state(const CasePreset& cs, const GridSpec& grid) {
    return cs.init == InitKind::dam_break ? init_dam_break(cs.a, grid) : init_peakon_antipeakon(grid);
}

RefineErrors refine_error_space(const Trajectory& coarse, const Trajectory& fine) {
    require_history(coarse, "refine_error_space");
    require_history(fine, "refine_error_space");
    const GridSpec& gc = coarse.history.front().u.grid;
    const GridSpec& gf = fine.history.front().u.grid;
    if (gf.M != 2 * gc.M)
        throw std::invalid_argument("refine_error_space: fine grid must double the coarse node count");
    if (coarse.history.size() != fine.history.size())
        throw std::invalid_argument("refine_error_space: trajectories store different level counts");

    // Coarse storage index j sits at the same point as fine storage index 2j+1.
    double eu = 0.0, erho = 0.0;
    for (size_t k = 0; k < coarse.history.size(); ++k) {
        const State& sc = coarse.history[k];
        const State& sf = fine.history[k];
        double acc = 0.0;
        for (int j = 0; j < gc.M; ++j) {
            eu = std::max(eu, std::abs(sc.u[j] - sf.u[2 * j + 1]));
            const double d = sc.rho[j] - sf.rho[2 * j + 1];
            acc += d * d;
        }
        erho = std::max(erho, std::sqrt(gc.h * acc));
    }
    return RefineErrors{eu, erho};
}

RefineErrors refine_error_time(const Trajectory& coarse, const Trajectory& fine) {
    require_history(coarse, "refine_error_time");
    require_history(fine, "refine_error_time");
    const GridSpec& gc = coarse.history.front().u.grid;
    if (!(gc == fine.history.front().u.grid))
        throw std::invalid_argument("refine_error_time: trajectories live on different grids");
    if (fine.history.size() != 2 * coarse.history.size() - 1)
        throw std::invalid_argument("refine_error_time: fine run must halve the time step");

    double eu = 0.0, erho = 0.0;
    for (size_t k = 0; k < coarse.history.size(); ++k) {
        const State& sc = coarse.history[k];
        const State& sf = fine.history[2 * k];
        double acc = 0.0;
        for (int j = 0; j < gc.M; ++j) {
            eu = std::max(eu, std::abs(sc.u[j] - sf.u[j]));
            const double d = sc.rho[j] - sf.rho[j];
            acc += d * d;
        }
        erho = std::max(erho, std::sqrt(gc.h * acc));
    }
    return RefineErrors{eu, erho};
}

double convergence_order(double err_coarse, double err_fine) {
    if (!(err_coarse > 0.0) || !(err_fine > 0.0))
        throw std::domain_error("convergence_order: errors must be positive");
    return std::log2(err_coarse / err_fine);
}

std::vector<ConvergenceRow> run_convergence_study(const CasePreset& cs, Axis axis, int levels,
                                                  double base_h, double base_tau,
                                                  const SolverCfg& cfg, int jobs) {
    if (levels < 2) throw std::invalid_argument("run_convergence_study: need at least 2 levels");
    const int runs = levels + 1;

    const GridSpec base_grid = GridSpec::with_spacing(cs.x_left, cs.L, base_h);
    const TimeGrid base_time = TimeGrid::with_tau(cs.T, base_tau);

    // Refinement doubles counts rather than re-rounding spacings so that
    // adjacent levels stay node- and level-aligned.
    std::vector<Trajectory> results(static_cast<size_t>(runs));
    std::vector<std::exception_ptr> failures(static_cast<size_t>(runs));
    auto run_level = [&](int l) {
        const int mult = 1 << l;
        const GridSpec g = axis == Axis::space
                               ? GridSpec::with_count(cs.x_left, cs.L, base_grid.M * mult)
                               : base_grid;
        const TimeGrid tg = axis == Axis::time ? TimeGrid::with_steps(cs.T, base_time.N * mult)
                                               : base_time;
        RunOptions opts;
        opts.record_invariants = false;
        opts.record_history = true;
        opts.warn_uniqueness = false;
        results[static_cast<size_t>(l)] = run(initial_state(cs, g), cs.params, tg, cfg, opts);
    };

    jobs = std::clamp(jobs, 1, runs);
    if (jobs == 1) {
        for (int l = 0; l < runs; ++l) {
            try {
                run_level(l);
            } catch (...) {
                failures[static_cast<size_t>(l)] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (int l = next.fetch_add(1); l < runs; l = next.fetch_add(1)) {
                    try {
                        run_level(l);
                    } catch (...) {
                        failures[static_cast<size_t>(l)] = std::current_exception();
                    }
                }
            });
        for (std::thread& t : pool) t.join();
    }

    int usable = runs;
    for (int l = 0; l < runs; ++l)
        if (failures[static_cast<size_t>(l)]) { usable = l; break; }

    std::vector<ConvergenceRow> rows;
    double prev_eu = 0.0, prev_erho = 0.0;
    for (int l = 0; l + 1 < usable; ++l) {
        const RefineErrors e = axis == Axis::space
                                   ? refine_error_space(results[static_cast<size_t>(l)],
                                                        results[static_cast<size_t>(l + 1)])
                                   : refine_error_time(results[static_cast<size_t>(l)],
                                                       results[static_cast<size_t>(l + 1)]);
        ConvergenceRow row;
        row.step = axis == Axis::space ? results[static_cast<size_t>(l)].history.front().u.grid.h
                                       : results[static_cast<size_t>(l)].time.tau;
        row.err_u_inf = e.err_u_inf;
        row.err_rho_l2 = e.err_rho_l2;
        row.degenerate = e.err_u_inf <= 0.0 || e.err_rho_l2 <= 0.0;
        if (l > 0) {
            if (prev_eu > 0.0 && e.err_u_inf > 0.0) row.ord_u = convergence_order(prev_eu, e.err_u_inf);
            if (prev_erho > 0.0 && e.err_rho_l2 > 0.0)
                row.ord_rho = convergence_order(prev_erho, e.err_rho_l2);
        }
        prev_eu = e.err_u_inf;
        prev_erho = e.err_rho_l2;
        rows.push_back(std::move(row));
    }

    for (int l = 0; l < runs; ++l)
        if (failures[static_cast<size_t>(l)]) {
            std::string why;
            try {
                std::rethrow_exception(failures[static_cast<size_t>(l)]);
            } catch (const std::exception& e) {
                why = e.what();
            }
            throw StudyError("study level " + std::to_string(l) + " failed: " + why, std::move(rows));
        }
    return rows;
}

double symmetry_probe(const Trajectory& traj) {
    const State* probe = nullptr;
    std::vector<const State*> levels;
    if (!traj.history.empty()) {
        for (const State& s : traj.history) levels.push_back(&s);
    } else {
        for (const auto& [t, s] : traj.snapshots) levels.push_back(&s);
        levels.push_back(&traj.final_state);
    }
    if (levels.empty()) throw std::invalid_argument("symmetry_probe: trajectory stores no states");
    probe = levels.front();

    const GridSpec& g = probe->u.grid;
    if (g.M % 2 != 0 || std::abs(g.x_left + 0.5 * g.L) > 1e-12 * g.L)
        throw std::invalid_argument("symmetry_probe: grid is not symmetric about x = 0");

    // Node j at x pairs with node (M-2-j) mod M at -x.
    double defect = 0.0;
    for (const State* s : levels)
        for (int j = 0; j < g.M; ++j) {
            const int jr = (g.M - 2 - j + g.M) % g.M;
            defect = std::max(defect, std::abs(s->u[j] + s->u[jr]));
        }
    return defect;
}

}  // namespace r2ch
