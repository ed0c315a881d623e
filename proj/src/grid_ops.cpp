#include "r2ch/grid_ops.hpp"

#include <cmath>

namespace r2ch {

GridFn centered_diff(const GridFn& v) {
    const int m = v.size();
    const double half = 0.5 / v.grid.h;
    GridFn w(v.grid);
    w[0] = (v[1] - v[m - 1]) * half;
    for (int i = 1; i < m - 1; ++i) w[i] = (v[i + 1] - v[i - 1]) * half;
    w[m - 1] = (v[0] - v[m - 2]) * half;
    return w;
}

GridFn second_diff(const GridFn& v) {
    const int m = v.size();
    const double b = 1.0 / (v.grid.h * v.grid.h);
    GridFn w(v.grid);
    w[0] = (v[1] - 2.0 * v[0] + v[m - 1]) * b;
    for (int i = 1; i < m - 1; ++i) w[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * b;
    w[m - 1] = (v[0] - 2.0 * v[m - 1] + v[m - 2]) * b;
    return w;
}

GridFn psi(const GridFn& u, const GridFn& v) {
    require_same_grid(u, v, "psi");
    const int m = u.size();
    const double a = 0.5 / u.grid.h;
    GridFn w(u.grid);
    auto at = [m](int i) { return i >= m ? i - m : (i < 0 ? i + m : i); };
    for (int i = 0; i < m; ++i) {
        const int ip = at(i + 1), im = at(i - 1);
        const double dv = (v[ip] - v[im]) * a;
        const double duv = (u[ip] * v[ip] - u[im] * v[im]) * a;
        w[i] = (u[i] * dv + duv) / 3.0;
    }
    return w;
}

double inner(const GridFn& u, const GridFn& v) {
    require_same_grid(u, v, "inner");
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return u.grid.h * s;
}

double inner_grad(const GridFn& v, const GridFn& w) {
    require_same_grid(v, w, "inner_grad");
    const int m = v.size();
    double s = (v[0] - v[m - 1]) * (w[0] - w[m - 1]);
    for (int i = 1; i < m; ++i) s += (v[i] - v[i - 1]) * (w[i] - w[i - 1]);
    return s / v.grid.h;  // h * sum / h^2
}

Norms norms(const GridFn& v) {
    return Norms{std::sqrt(inner(v, v)), std::sqrt(inner_grad(v, v)), norm_linf(v)};
}

double norm_linf(const GridFn& v) {
    double m = 0.0;
    for (double x : v.v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace r2ch
