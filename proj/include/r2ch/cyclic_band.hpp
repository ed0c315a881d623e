#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace r2ch {

// Factorization failure: the pivot at `pivot_index` fell below 1e-14 times the
// row scale, so the matrix is singular or hopelessly ill-conditioned.
class SolveError : public std::runtime_error {
  public:
    SolveError(const std::string& what, int pivot_index)
        : std::runtime_error(what), pivot_index(pivot_index) {}
    int pivot_index;
};

// Banded matrix with periodic wrap-around plus a right-hand side.
// Entry (row i, offset d), d in [-kl, ku], addresses column (i + d) mod n;
// offsets that leave [0, n) are the wrap corners coupling the first and last
// rows across the periodic seam.
struct CyclicBandSystem {
    int n = 0;
    int kl = 0;
    int ku = 0;
    std::vector<double> bands;  // n rows, kl + ku + 1 offsets each, row-major
    std::vector<double> rhs;

    CyclicBandSystem() = default;
    CyclicBandSystem(int n_, int kl_, int ku_) : n(n_), kl(kl_), ku(ku_) {
        if (n < 1 || kl < 0 || ku < 0)
            throw std::invalid_argument("CyclicBandSystem: bad shape n=" + std::to_string(n));
        bands.assign(static_cast<size_t>(n) * width(), 0.0);
        rhs.assign(static_cast<size_t>(n), 0.0);
    }

    int width() const { return kl + ku + 1; }

    double& at(int row, int offset) {
        return bands[static_cast<size_t>(row) * width() + offset + kl];
    }
    double at(int row, int offset) const {
        return bands[static_cast<size_t>(row) * width() + offset + kl];
    }
    void add(int row, int offset, double value) { at(row, offset) += value; }

    void reset() {
        bands.assign(bands.size(), 0.0);
        rhs.assign(rhs.size(), 0.0);
    }

    // Explicit dense matrix (row-major n*n), the oracle's view of the system.
    std::vector<double> to_dense() const;

    // Matrix-vector product against the implicit matrix.
    std::vector<double> apply(const std::vector<double>& x) const;
};

// Solve the system at O(n * bw^2) cost: banded LU with partial pivoting on the
// non-wrapping part, Woodbury correction for the periodic corners, verified
// against the residual contract (relative residual <= 1e-13); falls back to the
// dense path on breakdown and throws SolveError if that fails too.
std::vector<double> solve(const CyclicBandSystem& sys);

// Dense partial-pivot LU reference path (test oracle and fallback).
std::vector<double> solve_dense(const CyclicBandSystem& sys);

// Plain dense LU with partial pivoting, row-major storage.
class DenseLU {
  public:
    DenseLU(std::vector<double> a, int n);  // factors in place, throws SolveError
    std::vector<double> solve(std::vector<double> b) const;

  private:
    int n_;
    std::vector<double> lu_;
    std::vector<int> piv_;
};

}  // namespace r2ch
