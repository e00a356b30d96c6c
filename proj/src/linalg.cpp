#include "dlss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <lapacke.h>

#include "dlss/error.hpp"

namespace dlss::linalg {

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n)
        fail(ErrorCode::InvalidArgument, "tridiagonal: size mismatch");
    std::vector<double> c(n), x(rhs.begin(), rhs.end());
    if (n == 0) return x;
    double beta = diag[0];
    if (beta == 0.0) fail(ErrorCode::Solver, "tridiagonal: zero pivot");
    x[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i - 1];
        if (beta == 0.0) fail(ErrorCode::Solver, "tridiagonal: zero pivot");
        x[i] = (x[i] - sub[i] * x[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                             std::span<const double> sup, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (n < 3) {
        std::vector<double> a(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            a[i * n + i] += diag[i];
            a[i * n + (i + n - 1) % n] += sub[i];
            a[i * n + (i + 1) % n] += sup[i];
        }
        return solve_dense(std::move(a), std::vector<double>(rhs.begin(), rhs.end()));
    }
    const double alpha = sup[n - 1];  // A(n-1, 0)
    const double beta = sub[0];       // A(0, n-1)
    const double gamma = -diag[0];
    std::vector<double> d(diag.begin(), diag.end());
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    std::vector<double> x = solve_tridiagonal(sub, d, sup, rhs);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    std::vector<double> z = solve_tridiagonal(sub, d, sup, u);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    return x;
}

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    if (a.size() != n * n) fail(ErrorCode::InvalidArgument, "dense solve: size mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0 || !std::isfinite(a[piv * n + col]))
            fail(ErrorCode::Solver, "dense solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            std::swap(rhs[col], rhs[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * rhs[j];
        rhs[i] = s / a[i * n + i];
    }
    return rhs;
}

namespace {

std::size_t cyclic_column(std::size_t i, int d, std::size_t n) {
    return static_cast<std::size_t>((static_cast<std::ptrdiff_t>(i) + d + static_cast<std::ptrdiff_t>(n)) %
                                    static_cast<std::ptrdiff_t>(n));
}

}  // namespace

CyclicBandMatrix::CyclicBandMatrix(std::size_t n, std::size_t half_bandwidth)
    : n_(n), p_(half_bandwidth), entries_(n * (2 * half_bandwidth + 1), 0.0) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "band matrix: empty");
}

double& CyclicBandMatrix::band(std::size_t row, int offset) {
    return entries_[row * (2 * p_ + 1) + static_cast<std::size_t>(offset + static_cast<int>(p_))];
}

double CyclicBandMatrix::band(std::size_t row, int offset) const {
    return entries_[row * (2 * p_ + 1) + static_cast<std::size_t>(offset + static_cast<int>(p_))];
}

std::vector<double> CyclicBandMatrix::apply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    const int p = static_cast<int>(p_);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int d = -p; d <= p; ++d)
            s += band(i, d) * x[cyclic_column(i, d, n_)];
        y[i] = s;
    }
    return y;
}

std::vector<double> CyclicBandMatrix::to_dense() const {
    std::vector<double> a(n_ * n_, 0.0);
    const int p = static_cast<int>(p_);
    for (std::size_t i = 0; i < n_; ++i)
        for (int d = -p; d <= p; ++d)
            a[i * n_ + cyclic_column(i, d, n_)] += band(i, d);
    return a;
}

std::vector<double> CyclicBandMatrix::solve(std::span<const double> rhs) const {
    if (rhs.size() != n_) fail(ErrorCode::InvalidArgument, "band solve: size mismatch");
    const std::size_t p = p_;
    if (n_ < 4 * p + 4) return solve_dense(to_dense(), std::vector<double>(rhs.begin(), rhs.end()));

    const std::size_t m = n_ - p;  // interior unknowns 0..m-1, border m..n-1
    const auto mi = static_cast<lapack_int>(m);
    const auto kl = static_cast<lapack_int>(p);
    const lapack_int ldab = 2 * kl + kl + 1;
    // Column-major band storage: A(i,j) -> ab[(kl + ku + i - j) + j*ldab].
    std::vector<double> ab(static_cast<std::size_t>(ldab) * m, 0.0);
    std::vector<double> b(m * (p + 1), 0.0);  // columns: A12 (p columns) then rhs
    std::vector<double> a21(p * m, 0.0), a22(p * p, 0.0);
    const int ip = static_cast<int>(p);
    for (std::size_t i = 0; i < n_; ++i) {
        for (int d = -ip; d <= ip; ++d) {
            const std::size_t j = cyclic_column(i, d, n_);
            const double v = band(i, d);
            if (v == 0.0) continue;
            if (i < m && j < m) {
                ab[static_cast<std::size_t>(2 * kl + static_cast<lapack_int>(i) - static_cast<lapack_int>(j)) +
                   j * static_cast<std::size_t>(ldab)] += v;
            } else if (i < m) {
                b[(j - m) * m + i] += v;
            } else if (j < m) {
                a21[(i - m) * m + j] += v;
            } else {
                a22[(i - m) * p + (j - m)] += v;
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) b[p * m + i] = rhs[i];

    std::vector<lapack_int> ipiv(m);
    lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, mi, mi, kl, kl, ab.data(), ldab, ipiv.data());
    if (info != 0) fail(ErrorCode::Solver, "band solve: singular interior block");
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', mi, kl, kl, static_cast<lapack_int>(p + 1), ab.data(), ldab,
                          ipiv.data(), b.data(), mi);
    if (info != 0) fail(ErrorCode::Solver, "band solve: dgbtrs failed");

    // Schur complement S = A22 - A21 A11^{-1} A12, reduced rhs r2 = b2 - A21 A11^{-1} b1.
    std::vector<double> s(a22), r2(p);
    for (std::size_t r = 0; r < p; ++r) {
        double acc = rhs[m + r];
        for (std::size_t j = 0; j < m; ++j) {
            const double w = a21[r * m + j];
            if (w == 0.0) continue;
            for (std::size_t c = 0; c < p; ++c) s[r * p + c] -= w * b[c * m + j];
            acc -= w * b[p * m + j];
        }
        r2[r] = acc;
    }
    std::vector<double> y = solve_dense(std::move(s), std::move(r2));
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < m; ++i) {
        double v = b[p * m + i];
        for (std::size_t c = 0; c < p; ++c) v -= b[c * m + i] * y[c];
        x[i] = v;
    }
    for (std::size_t r = 0; r < p; ++r) x[m + r] = y[r];
    return x;
}

}  // namespace dlss::linalg
