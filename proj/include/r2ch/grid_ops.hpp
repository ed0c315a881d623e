#pragma once

#include "r2ch/grid.hpp"

namespace r2ch {

// Centered first difference: w_i = (v_{i+1} - v_{i-1}) / (2h).
GridFn centered_diff(const GridFn& v);

// Second difference: w_i = (v_{i+1} - 2 v_i + v_{i-1}) / h^2.
GridFn second_diff(const GridFn& v);

// Bilinear form w_i = (1/3) [ u_i * centered_diff(v)_i + centered_diff(u.*v)_i ].
// Skew against its second argument: (psi(u,v), v) = 0 for any u.
GridFn psi(const GridFn& u, const GridFn& v);

// Discrete L2 inner product h * sum_i u_i v_i.
double inner(const GridFn& u, const GridFn& v);

// Half-grid gradient product h * sum_i (v_i - v_{i-1})(w_i - w_{i-1}) / h^2.
double inner_grad(const GridFn& v, const GridFn& w);

struct Norms {
    double l2;
    double h1_semi;
    double linf;
};

Norms norms(const GridFn& v);

double norm_linf(const GridFn& v);

}  // namespace r2ch
