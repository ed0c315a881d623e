#include "r2ch/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "r2ch/invariants.hpp"
#include "r2ch/log.hpp"

namespace r2ch {

namespace {

int wrap(int i, int m) { return i >= m ? i - m : (i < 0 ? i + m : i); }

double max_abs_diff(const GridFn& a, const GridFn& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

// One sweep of the linearized midpoint system. Lagged fields (the current
// iterate) supply the coefficients; the unknown vector is the next iterate,
// interleaved as z[2i] = u_i, z[2i+1] = rho_i. Row 2i carries the velocity
// equation at node i, row 2i+1 the elevation equation.
CyclicBandSystem assemble_picard_system(const State& prev, const State& iterate,
                                        const PhysParams& p, double tau) {
    require_same_grid(prev.u, iterate.u, "assemble_picard_system");
    if (tau == 0.0) throw std::invalid_argument("assemble_picard_system: tau must be nonzero");

    const int m = prev.u.size();
    const double h = prev.u.grid.h;
    const double a = 0.5 / h;          // centered-difference weight
    const double b = 1.0 / (h * h);    // second-difference weight
    const double r2 = 2.0 / tau;
    const double crho = p.rho_weight();

    const GridFn& un = prev.u;
    const GridFn& rn = prev.rho;
    const GridFn& pl = iterate.u;            // lagged velocity
    const GridFn& ql = iterate.rho;          // lagged elevation
    const GridFn wl = second_diff(pl);       // lagged curvature
    const GridFn d2un = second_diff(un);

    CyclicBandSystem sys(2 * m, 4, 4);
    for (int j = 0; j < m; ++j) {
        const int jp = wrap(j + 1, m), jm = wrap(j - 1, m);
        const int ru = 2 * j, rr = 2 * j + 1;

        // Velocity row: time terms, advection, the two bilinear forms,
        // dispersion, and the rotation couplings.
        sys.add(ru, 0, r2 * (1.0 + 2.0 * b));
        sys.add(ru, +2, -r2 * b - p.kappa * a + a * (pl[j] + pl[jp]) - p.sigma * a * (wl[j] + wl[jp])
                            - 2.0 * p.mu * a * b - 2.0 * p.omega * a * ql[j] * ql[jp]);
        sys.add(ru, -2, -r2 * b + p.kappa * a - a * (pl[j] + pl[jm]) + p.sigma * a * (wl[j] + wl[jm])
                            + 2.0 * p.mu * a * b + 2.0 * p.omega * a * ql[j] * ql[jm]);
        sys.add(ru, +4, p.mu * a * b);
        sys.add(ru, -4, -p.mu * a * b);
        sys.add(ru, +3, crho * a * ql[j]);
        sys.add(ru, -1, -crho * a * ql[j]);
        sys.rhs[static_cast<size_t>(ru)] = r2 * (un[j] - d2un[j]);

        // Elevation row.
        sys.add(rr, 0, r2);
        sys.add(rr, +1, a * ql[jp]);
        sys.add(rr, -3, -a * ql[jm]);
        sys.rhs[static_cast<size_t>(rr)] = r2 * rn[j];
    }
    return sys;
}

PicardResult picard_step(const State& prev, const PhysParams& p, double tau, const SolverCfg& cfg) {
    const int m = prev.u.size();
    State iterate{prev.u, prev.rho, prev.t};
    double increment = 0.0;
    for (int l = 0; l < cfg.max_picard_iters; ++l) {
        const CyclicBandSystem sys = assemble_picard_system(prev, iterate, p, tau);
        const std::vector<double> z = solve(sys);
        GridFn u_new(prev.u.grid), rho_new(prev.u.grid);
        for (int j = 0; j < m; ++j) {
            u_new[j] = z[static_cast<size_t>(2 * j)];
            rho_new[j] = z[static_cast<size_t>(2 * j + 1)];
        }
        increment = std::max(max_abs_diff(u_new, iterate.u), max_abs_diff(rho_new, iterate.rho));
        iterate.u = std::move(u_new);
        iterate.rho = std::move(rho_new);
        if (increment <= cfg.picard_tol) {
            GridFn u_next(prev.u.grid), rho_next(prev.u.grid);
            for (int j = 0; j < m; ++j) {
                u_next[j] = 2.0 * iterate.u[j] - prev.u[j];
                rho_next[j] = 2.0 * iterate.rho[j] - prev.rho[j];
            }
            return PicardResult{State{std::move(u_next), std::move(rho_next), prev.t + tau}, l + 1};
        }
    }
    throw StepError("fixed-point sweep stalled at increment " + std::to_string(increment) +
                        " after " + std::to_string(cfg.max_picard_iters) + " iterations",
                    increment);
}

std::vector<double> midpoint_residual(const State& prev, const GridFn& u_mid, const GridFn& rho_mid,
                                      const PhysParams& p, double tau) {
    require_same_grid(prev.u, u_mid, "midpoint_residual");
    const int m = prev.u.size();
    const double r2 = 2.0 / tau;
    const double crho = p.rho_weight();

    const GridFn d2u = second_diff(u_mid);
    const GridFn d2un = second_diff(prev.u);
    const GridFn du = centered_diff(u_mid);
    const GridFn drho = centered_diff(rho_mid);
    const GridFn psi_uu = psi(u_mid, u_mid);
    const GridFn psi_wu = psi(d2u, u_mid);
    const GridFn d3u = centered_diff(d2u);
    GridFn rho_u(u_mid.grid);
    for (int j = 0; j < m; ++j) rho_u[j] = rho_mid[j] * u_mid[j];
    const GridFn d_rho_u = centered_diff(rho_u);

    std::vector<double> f(static_cast<size_t>(2 * m), 0.0);
    for (int j = 0; j < m; ++j) {
        f[static_cast<size_t>(2 * j)] =
            r2 * (u_mid[j] - prev.u[j]) - r2 * (d2u[j] - d2un[j]) - p.kappa * du[j] +
            3.0 * psi_uu[j] - 3.0 * p.sigma * psi_wu[j] + p.mu * d3u[j] +
            crho * rho_mid[j] * drho[j] - 2.0 * p.omega * rho_mid[j] * d_rho_u[j];
        f[static_cast<size_t>(2 * j + 1)] = r2 * (rho_mid[j] - prev.rho[j]) + d_rho_u[j];
    }
    return f;
}

CyclicBandSystem midpoint_jacobian(const State& prev, const GridFn& u_mid, const GridFn& rho_mid,
                                   const PhysParams& p, double tau) {
    const int m = prev.u.size();
    const double h = prev.u.grid.h;
    const double a = 0.5 / h;
    const double b = 1.0 / (h * h);
    const double r2 = 2.0 / tau;
    const double crho = p.rho_weight();

    const GridFn& u = u_mid;
    const GridFn& rho = rho_mid;
    const GridFn w = second_diff(u);
    GridFn rho_u(u.grid);
    for (int j = 0; j < m; ++j) rho_u[j] = rho[j] * u[j];
    const GridFn d_rho_u = centered_diff(rho_u);
    const GridFn drho = centered_diff(rho);

    CyclicBandSystem sys(2 * m, 4, 4);
    for (int j = 0; j < m; ++j) {
        const int jp = wrap(j + 1, m), jm = wrap(j - 1, m);
        const int ru = 2 * j, rr = 2 * j + 1;
        const double dxu = a * (u[jp] - u[jm]);

        // d(velocity row)/du. Same shape as the linearized sweep plus the
        // derivative through the first slot of both bilinear forms.
        sys.add(ru, 0, r2 * (1.0 + 2.0 * b) + dxu);
        sys.add(ru, +2, -r2 * b - p.kappa * a + a * (u[j] + 2.0 * u[jp]) - p.sigma * a * (w[j] + w[jp])
                            - 2.0 * p.mu * a * b - 2.0 * p.omega * a * rho[j] * rho[jp]);
        sys.add(ru, -2, -r2 * b + p.kappa * a - a * (u[j] + 2.0 * u[jm]) + p.sigma * a * (w[j] + w[jm])
                            + 2.0 * p.mu * a * b + 2.0 * p.omega * a * rho[j] * rho[jm]);
        sys.add(ru, +4, p.mu * a * b);
        sys.add(ru, -4, -p.mu * a * b);
        // First slot of psi(second_diff(u), u): the three-point coefficient
        // field composed with the second difference.
        const double c1m = -p.sigma * (-a * u[jm]);
        const double c10 = -p.sigma * dxu;
        const double c1p = -p.sigma * (a * u[jp]);
        sys.add(ru, -4, c1m * b);
        sys.add(ru, -2, c1m * -2.0 * b + c10 * b);
        sys.add(ru, 0, c1m * b + c10 * -2.0 * b + c1p * b);
        sys.add(ru, +2, c10 * b + c1p * -2.0 * b);
        sys.add(ru, +4, c1p * b);

        // d(velocity row)/drho.
        sys.add(ru, +1, crho * drho[j] - 2.0 * p.omega * d_rho_u[j]);
        sys.add(ru, +3, crho * a * rho[j] - 2.0 * p.omega * a * rho[j] * u[jp]);
        sys.add(ru, -1, -crho * a * rho[j] + 2.0 * p.omega * a * rho[j] * u[jm]);

        // Elevation row.
        sys.add(rr, 0, r2);
        sys.add(rr, +1, a * rho[jp]);
        sys.add(rr, -3, -a * rho[jm]);
        sys.add(rr, +2, a * u[jp]);
        sys.add(rr, -2, -a * u[jm]);
    }
    return sys;
}

State newton_step(const State& prev, const PhysParams& p, double tau, const SolverCfg& cfg) {
    const int m = prev.u.size();
    GridFn u = prev.u, rho = prev.rho;
    double res = 0.0;
    for (int it = 0; it <= cfg.max_newton_iters; ++it) {
        const std::vector<double> f = midpoint_residual(prev, u, rho, p, tau);
        res = 0.0;
        for (double v : f) res = std::max(res, std::abs(v));
        if (res <= cfg.newton_tol) {
            GridFn u_next(prev.u.grid), rho_next(prev.u.grid);
            for (int j = 0; j < m; ++j) {
                u_next[j] = 2.0 * u[j] - prev.u[j];
                rho_next[j] = 2.0 * rho[j] - prev.rho[j];
            }
            return State{std::move(u_next), std::move(rho_next), prev.t + tau};
        }
        if (it == cfg.max_newton_iters) break;
        CyclicBandSystem sys = midpoint_jacobian(prev, u, rho, p, tau);
        for (size_t i = 0; i < f.size(); ++i) sys.rhs[i] = -f[i];
        const std::vector<double> dz = solve(sys);
        for (int j = 0; j < m; ++j) {
            u[j] += dz[static_cast<size_t>(2 * j)];
            rho[j] += dz[static_cast<size_t>(2 * j + 1)];
        }
    }
    throw StepError("Newton stalled at residual " + std::to_string(res) + " after " +
                        std::to_string(cfg.max_newton_iters) + " iterations",
                    res);
}

std::optional<UniquenessWarning> uniqueness_guard(const GridFn& u_mid, double tau, double t) {
    const double r = std::abs(tau) * norm_linf(u_mid) / (2.0 * u_mid.grid.h);
    if (r >= 1.0) return UniquenessWarning{t, r};
    return std::nullopt;
}

Trajectory run(const State& init, const PhysParams& p, const TimeGrid& tg, const SolverCfg& cfg,
               const RunOptions& opts) {
    Trajectory traj;
    traj.params = p;
    traj.time = tg;

    // Map each requested snapshot time to its nearest step index.
    std::vector<std::pair<int, double>> snaps;
    for (double t : opts.snapshot_times) {
        int k = static_cast<int>(std::lround(t / tg.tau));
        snaps.emplace_back(std::clamp(k, 0, tg.N), t);
    }
    std::stable_sort(snaps.begin(), snaps.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    size_t next_snap = 0;
    auto capture = [&](int k, const State& s) {
        while (next_snap < snaps.size() && snaps[next_snap].first == k)
            traj.snapshots.emplace_back(snaps[next_snap++].second, s);
    };

    State cur = init;
    if (opts.record_invariants) traj.invariants.push_back(sample_invariants(cur, p, 0));
    if (opts.record_history) traj.history.push_back(cur);
    capture(0, cur);

    for (int k = 1; k <= tg.N; ++k) {
        PicardResult step;
        try {
            step = picard_step(cur, p, tg.tau, cfg);
        } catch (const std::exception& e) {
            throw RunError("step " + std::to_string(k) + " failed: " + e.what(), k);
        }
        // Stamp the level time directly; accumulating prev.t + tau lets rounding
        // creep into the reported time stamps.
        step.next.t = k * tg.tau;
        if (opts.warn_uniqueness) {
            GridFn u_mid(cur.u.grid);
            for (int j = 0; j < cur.u.size(); ++j) u_mid[j] = 0.5 * (cur.u[j] + step.next.u[j]);
            if (auto w = uniqueness_guard(u_mid, tg.tau, cur.t + 0.5 * tg.tau)) {
                log::warn("uniqueness margin lost at t=" + std::to_string(w->t) +
                          " (ratio=" + std::to_string(w->ratio) + ")");
                traj.warnings.push_back(*w);
            }
        }
        if (opts.record_invariants) traj.invariants.push_back(sample_invariants(step.next, p, step.iters));
        if (opts.record_history) traj.history.push_back(step.next);
        capture(k, step.next);
        traj.max_picard_iters = std::max(traj.max_picard_iters, step.iters);
        traj.total_picard_iters += step.iters;
        for (const auto& obs : opts.observers) obs(StepRecord{k, cur, step.next, step.iters});
        cur = std::move(step.next);
    }
    traj.final_state = std::move(cur);
    return traj;
}

}  // namespace r2ch
