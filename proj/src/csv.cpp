#include "r2ch/csv.hpp"

#include <charconv>
#include <system_error>

namespace r2ch {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_invariants_csv(std::ostream& out, const std::vector<InvariantSample>& samples) {
    out << "t,E,H,I,E_shift,H_shift,picard_iters\n";
    for (const InvariantSample& s : samples) {
        out << format_double(s.t) << ',' << format_double(s.E) << ',' << format_double(s.H) << ','
            << format_double(s.I) << ',' << format_double(s.E_shift) << ','
            << format_double(s.H_shift) << ',' << s.picard_iters << '\n';
    }
}

void write_snapshot_csv(std::ostream& out, const State& s) {
    out << "x,u,rho\n";
    for (int i = 0; i < s.u.grid.M; ++i) {
        out << format_double(s.u.grid.node(i)) << ',' << format_double(s.u.v[i]) << ','
            << format_double(s.rho.v[i]) << '\n';
    }
}

void write_orders_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    out << "step,err_u_inf,ord_u,err_rho_l2,ord_rho\n";
    for (const ConvergenceRow& r : rows) {
        out << format_double(r.step) << ',' << format_double(r.err_u_inf) << ',';
        if (r.ord_u) out << format_double(*r.ord_u);
        out << ',' << format_double(r.err_rho_l2) << ',';
        if (r.ord_rho) out << format_double(*r.ord_rho);
        out << '\n';
    }
}

std::string snapshot_filename(double t) { return "snapshot_t" + format_double(t) + ".csv"; }

}  // namespace r2ch
