#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dlss::linalg {

/// Thomas algorithm. sub[0] and sup[n-1] are ignored.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs);

/// Nonsingular cyclic tridiagonal system (Sherman-Morrison). sub[0] couples row 0 to column n-1,
/// sup[n-1] couples row n-1 to column 0.
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                             std::span<const double> sup, std::span<const double> rhs);

/// Dense LU with partial pivoting; a is row-major n x n and is overwritten.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs);

/**
 * Square matrix whose only nonzeros lie within cyclic distance `half_bandwidth` of the diagonal.
 * band(i, d) is the entry at row i, column (i + d) mod n, for d in [-p, p].
 */
class CyclicBandMatrix {
public:
    CyclicBandMatrix(std::size_t n, std::size_t half_bandwidth);

    std::size_t size() const noexcept { return n_; }
    std::size_t half_bandwidth() const noexcept { return p_; }
    double& band(std::size_t row, int offset);
    double band(std::size_t row, int offset) const;

    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> to_dense() const;

    /**
     * Solves A x = rhs. For n large enough the last p unknowns are treated as a border: the
     * leading block is banded and factored with LAPACK dgbtrf, the border via its p x p Schur
     * complement. Small systems go through the dense solver.
     */
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::size_t n_;
    std::size_t p_;
    std::vector<double> entries_;  // row-major, 2p+1 per row
};

}  // namespace dlss::linalg
