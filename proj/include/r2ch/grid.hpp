#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace r2ch {

// Uniform periodic grid on [x_left, x_left + L] with M nodes, h = L/M.
// Node i (0-based storage) sits at x_left + (i+1)*h; all index arithmetic
// wraps modulo M.
struct GridSpec {
    double x_left = 0.0;
    double L = 1.0;
    int M = 4;
    double h = 0.25;

    static GridSpec with_count(double x_left, double L, int M) {
        if (!(L > 0.0)) throw std::invalid_argument("GridSpec: period L must be positive");
        if (M < 4) throw std::invalid_argument("GridSpec: need at least 4 nodes, got " + std::to_string(M));
        return GridSpec{x_left, L, M, L / M};
    }

    // The period length is physical; h is derived. Non-integer L/h rounds to the
    // nearest node count and h is recomputed as L/M.
    static GridSpec with_spacing(double x_left, double L, double h_requested) {
        if (!(h_requested > 0.0)) throw std::invalid_argument("GridSpec: spacing must be positive");
        int M = static_cast<int>(std::lround(L / h_requested));
        return with_count(x_left, L, M);
    }

    double node(int i) const { return x_left + (i + 1) * h; }

    bool operator==(const GridSpec&) const = default;
};

// A real-valued function sampled on a periodic grid.
struct GridFn {
    GridSpec grid;
    std::vector<double> v;

    GridFn() : v(static_cast<size_t>(grid.M), 0.0) {}
    explicit GridFn(const GridSpec& g, double fill = 0.0) : grid(g), v(static_cast<size_t>(g.M), fill) {}
    GridFn(const GridSpec& g, std::vector<double> values) : grid(g), v(std::move(values)) {
        if (static_cast<int>(v.size()) != g.M)
            throw std::invalid_argument("GridFn: value count " + std::to_string(v.size()) +
                                        " does not match grid M=" + std::to_string(g.M));
    }

    int size() const { return grid.M; }
    double& operator[](int i) { return v[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<size_t>(i)]; }

    // Access at any integer index, reduced modulo M.
    double wrapped(int i) const {
        int m = grid.M;
        int r = i % m;
        if (r < 0) r += m;
        return v[static_cast<size_t>(r)];
    }
};

inline void require_same_grid(const GridFn& a, const GridFn& b, const char* where) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument(std::string(where) + ": operands live on different grids");
}

}  // namespace r2ch
