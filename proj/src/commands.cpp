#include "r2ch/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <vector>

#include "r2ch/csv.hpp"
#include "r2ch/grid_ops.hpp"
#include "r2ch/log.hpp"

namespace fs = std::filesystem;

namespace r2ch {

namespace {

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        log::error("cannot open '" + path.string() + "' for writing");
        return false;
    }
    body(out);
    out.flush();
    if (out.fail()) {
        log::error("write to '" + path.string() + "' failed");
        return false;
    }
    return true;
}

void gnuplot_preamble(std::ostream& o) {
    o << "# Companion plotting script; run `gnuplot <this file>` in the output directory.\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead noenhanced\n"
      << "set terminal pngcairo size 1000,700\n";
}

}  // namespace

int cmd_run(const RunConfig& cfg, bool invariants_only, bool gnuplot_script) {
    ResolvedRun rr;
    try {
        rr = resolve(cfg);
    } catch (const ParseError& e) {
        log::error(e.what());
        return kExitUsage;
    }

    std::error_code ec;
    fs::create_directories(rr.out_dir, ec);
    if (ec) {
        log::error("cannot create output directory '" + rr.out_dir + "': " + ec.message());
        return kExitFailure;
    }

    RunOptions opts;
    if (!invariants_only) {
        opts.snapshot_times = rr.snapshot_times;
        if (rr.emit_fields) {
            opts.snapshot_times.push_back(0.0);
            opts.snapshot_times.push_back(rr.time.T);
        }
        std::sort(opts.snapshot_times.begin(), opts.snapshot_times.end());
        opts.snapshot_times.erase(
            std::unique(opts.snapshot_times.begin(), opts.snapshot_times.end()),
            opts.snapshot_times.end());
    }

    const auto start = std::chrono::steady_clock::now();
    Trajectory traj;
    try {
        traj = run(rr.init, rr.params, rr.time, rr.solver, opts);
    } catch (const std::exception& e) {
        log::error(std::string("run aborted: ") + e.what());
        return kExitFailure;
    }
    const double wall = elapsed_s(start);

    const fs::path dir(rr.out_dir);
    if (!write_file(dir / "invariants.csv",
                    [&](std::ostream& o) { write_invariants_csv(o, traj.invariants); }))
        return kExitFailure;
    if (!invariants_only) {
        for (const auto& [t, s] : traj.snapshots)
            if (!write_file(dir / snapshot_filename(t),
                            [&](std::ostream& o) { write_snapshot_csv(o, s); }))
                return kExitFailure;
    }
    if (gnuplot_script) {
        const bool ok = write_file(dir / "plot.gp", [&](std::ostream& o) {
            gnuplot_preamble(o);
            o << "set xlabel 't'\n"
              << "set output 'invariants.png'\n"
              << "plot 'invariants.csv' using 1:2 with lines, \\\n"
              << "     'invariants.csv' using 1:3 with lines, \\\n"
              << "     'invariants.csv' using 1:4 with lines\n";
            if (!invariants_only) {
                o << "set xlabel 'x'\n";
                for (const auto& [t, s] : traj.snapshots) {
                    const std::string csv = snapshot_filename(t);
                    const std::string png = "snapshot_t" + format_double(t) + ".png";
                    o << "set output '" << png << "'\n"
                      << "plot '" << csv << "' using 1:2 with lines, '" << csv
                      << "' using 1:3 with lines\n";
                }
            }
        });
        if (!ok) return kExitFailure;
    }

    const InvariantSample& first = traj.invariants.front();
    double de = 0.0, dh = 0.0, di = 0.0;
    for (const InvariantSample& s : traj.invariants) {
        de = std::max(de, std::abs(s.E - first.E));
        dh = std::max(dh, std::abs(s.H - first.H));
        di = std::max(di, std::abs(s.I - first.I));
    }
    std::printf(
        "%s: %d steps (M=%d, h=%.6g, tau=%.6g), drift E=%.3e H=%.3e I=%.3e, "
        "max picard iters=%d, wall %.2fs\n",
        rr.case_name.c_str(), rr.time.N, rr.grid.M, rr.grid.h, rr.time.tau, de, dh, di,
        traj.max_picard_iters, wall);
    if (!traj.warnings.empty())
        log::warn("uniqueness margin was lost on " + std::to_string(traj.warnings.size()) +
                  " step(s); see log");
    return kExitOk;
}

int cmd_converge(const RunConfig& cfg, Axis axis, int levels, int jobs, bool gnuplot_script) {
    if (levels < 2) {
        log::error("converge needs at least 2 levels");
        return kExitUsage;
    }
    if (jobs < 1) {
        log::error("jobs must be at least 1");
        return kExitUsage;
    }

    ResolvedRun rr;
    try {
        rr = resolve(cfg);
    } catch (const ParseError& e) {
        log::error(e.what());
        return kExitUsage;
    }

    CasePreset cs;
    cs.name = rr.case_name;
    cs.init = rr.init_kind;
    cs.a = rr.init_a;
    cs.x_left = rr.grid.x_left;
    cs.L = rr.grid.L;
    cs.T = rr.time.T;
    cs.params = rr.params;
    cs.default_h = rr.grid.h;
    cs.default_tau = rr.time.tau;

    std::error_code ec;
    fs::create_directories(rr.out_dir, ec);
    if (ec) {
        log::error("cannot create output directory '" + rr.out_dir + "': " + ec.message());
        return kExitFailure;
    }

    const std::string axis_tag = axis == Axis::space ? "space" : "time";
    const auto start = std::chrono::steady_clock::now();
    std::vector<ConvergenceRow> rows;
    int status = kExitOk;
    try {
        rows = run_convergence_study(cs, axis, levels, rr.grid.h, rr.time.tau, rr.solver, jobs);
    } catch (const StudyError& e) {
        log::error(e.what());
        rows = e.completed;
        status = kExitFailure;
    }
    const double wall = elapsed_s(start);

    const fs::path dir(rr.out_dir);
    const std::string csv_name = "orders_" + axis_tag + ".csv";
    if (!write_file(dir / csv_name, [&](std::ostream& o) { write_orders_csv(o, rows); }))
        return kExitFailure;
    if (gnuplot_script) {
        const bool ok = write_file(dir / ("plot_orders_" + axis_tag + ".gp"), [&](std::ostream& o) {
            gnuplot_preamble(o);
            o << "set logscale xy\n"
              << "set xlabel '" << (axis == Axis::space ? "h" : "tau") << "'\n"
              << "set output 'orders_" << axis_tag << ".png'\n"
              << "plot '" << csv_name << "' using 1:2 with linespoints, '" << csv_name
              << "' using 1:4 with linespoints\n";
        });
        if (!ok) return kExitFailure;
    }

    if (rows.empty()) {
        std::printf("%s %s study: no completed refinement pairs, wall %.2fs\n",
                    rr.case_name.c_str(), axis_tag.c_str(), wall);
    } else {
        const ConvergenceRow& last = rows.back();
        std::printf("%s %s study: %zu rows, finest err_u_inf=%.4e ord_u=%s, wall %.2fs\n",
                    rr.case_name.c_str(), axis_tag.c_str(), rows.size(), last.err_u_inf,
                    last.ord_u ? format_double(*last.ord_u).c_str() : "-", wall);
    }
    return status;
}

namespace {

// Worst relative defect of the four stationary identities over random pairs.
struct IdentityDefects {
    double transport_compat = 0.0;   // (psi(u,v), v) = 0
    double centered_null = 0.0;      // (D u, u) = 0
    double centered_antisym = 0.0;   // (D u, v) = -(u, D v)
    double second_diff_parts = 0.0;  // (D2 u, v) = -<d u, d v>
    double two_level_product = 0.0;  // product rule for the two-level average
};

double rel(double defect, double scale) { return defect / std::max(scale, 1e-300); }

IdentityDefects probe_identities(int pairs, const std::vector<int>& sizes, std::mt19937& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> tau_dist(0.01, 1.0);
    IdentityDefects d;

    for (int trial = 0; trial < pairs; ++trial) {
        const int M = sizes[static_cast<size_t>(trial) % sizes.size()];
        const GridSpec g = GridSpec::with_count(0.0, 1.0 + unif(rng) * 0.5, M);
        GridFn u(g), v(g);
        for (int i = 0; i < M; ++i) u[i] = unif(rng);
        for (int i = 0; i < M; ++i) v[i] = unif(rng);

        const GridFn du = centered_diff(u), dv = centered_diff(v);
        const GridFn pu = psi(u, v);
        const Norms nu = norms(u), nv = norms(v), ndu = norms(du), ndv = norms(dv);

        d.transport_compat = std::max(
            d.transport_compat, rel(std::abs(inner(pu, v)), norms(pu).l2 * nv.l2));
        d.centered_null = std::max(d.centered_null, rel(std::abs(inner(du, u)), ndu.l2 * nu.l2));
        d.centered_antisym =
            std::max(d.centered_antisym, rel(std::abs(inner(du, v) + inner(u, dv)),
                                             ndu.l2 * nv.l2 + nu.l2 * ndv.l2));
        const GridFn d2u = second_diff(u);
        d.second_diff_parts =
            std::max(d.second_diff_parts, rel(std::abs(inner(d2u, v) + inner_grad(u, v)),
                                              norms(d2u).l2 * nv.l2 + nu.h1_semi * nv.h1_semi));

        // Two time levels of each field; the identity rewrites the pairing of a
        // discrete time derivative with the midpoint product.
        GridFn u1(g), v1(g);
        for (int i = 0; i < M; ++i) u1[i] = unif(rng);
        for (int i = 0; i < M; ++i) v1[i] = unif(rng);
        const double tau = tau_dist(rng);
        GridFn dtu(g), dtv(g), umid_vmid(g), u1v1(g), u0v0(g), jump_dtv(g), uu_cross(g);
        for (int i = 0; i < M; ++i) {
            dtu[i] = (u1[i] - u[i]) / tau;
            dtv[i] = (v1[i] - v[i]) / tau;
            umid_vmid[i] = 0.5 * (u[i] + u1[i]) * 0.5 * (v[i] + v1[i]);
            u1v1[i] = u1[i] * v1[i];
            u0v0[i] = u[i] * v[i];
            jump_dtv[i] = (u1[i] - u[i]) * dtv[i];
            uu_cross[i] = u1[i] * u[i];
        }
        const double lhs = inner(dtu, umid_vmid);
        const double t1 = (inner(u1, u1v1) - inner(u, u0v0)) / (2.0 * tau);
        GridFn jump(g);
        for (int i = 0; i < M; ++i) jump[i] = u1[i] - u[i];
        const double t2 = -0.25 * inner(jump, jump_dtv);
        const double t3 = -0.5 * inner(uu_cross, dtv);
        const double scale = std::abs(lhs) + std::abs(t1) + std::abs(t2) + std::abs(t3);
        d.two_level_product =
            std::max(d.two_level_product, rel(std::abs(lhs - (t1 + t2 + t3)), scale));
    }
    return d;
}

}  // namespace

int cmd_selftest(std::ostream& out) {
    std::mt19937 rng(0x52434855u);
    const auto start = std::chrono::steady_clock::now();
    const IdentityDefects d = probe_identities(1000, {8, 64, 1024}, rng);

    constexpr double tol = 1e-12;
    bool all_ok = true;
    auto report = [&](const char* name, double worst) {
        const bool ok = worst <= tol;
        all_ok = all_ok && ok;
        char line[128];
        std::snprintf(line, sizeof line, "selftest %-28s worst %.3e  %s\n", name, worst,
                      ok ? "PASS" : "FAIL");
        out << line;
    };
    report("transport compatibility", d.transport_compat);
    report("centered-difference null", d.centered_null);
    report("centered antisymmetry", d.centered_antisym);
    report("second-difference parts rule", d.second_diff_parts);
    report("two-level product rule", d.two_level_product);
    char tail[128];
    std::snprintf(tail, sizeof tail, "selftest %s (1000 pairs, %.2fs)\n",
                  all_ok ? "PASS" : "FAIL", elapsed_s(start));
    out << tail;
    return all_ok ? kExitOk : kExitFailure;
}

}  // namespace r2ch
