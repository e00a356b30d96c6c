#include "dlss/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dlss/error.hpp"
#include "dlss/linalg.hpp"

namespace dlss {

double GridFunction::cyclic(std::ptrdiff_t k) const { return values_[wrap(k, values_.size())]; }

GridState::GridState(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) fail(ErrorCode::InvalidArgument, "grid state: empty");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]) || values_[k] < 0.0)
            fail(ErrorCode::InvalidArgument,
                 "grid state: entry " + std::to_string(k) + " is negative or not finite");
    }
}

GridState GridState::uniform(std::size_t n, double value) { return GridState(std::vector<double>(n, value)); }

double GridState::cyclic(std::ptrdiff_t k) const { return values_[wrap(k, values_.size())]; }

double GridState::mass() const { return mean(values_); }

double GridState::min() const { return *std::min_element(values_.begin(), values_.end()); }

double inner_product(std::span<const double> v, std::span<const double> w) {
    if (v.size() != w.size()) fail(ErrorCode::InvalidArgument, "inner_product: length mismatch");
    if (v.empty()) fail(ErrorCode::InvalidArgument, "inner_product: empty vectors");
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * w[k];
    return s / static_cast<double>(v.size());
}

double mean(std::span<const double> f) {
    if (f.empty()) fail(ErrorCode::InvalidArgument, "mean: empty vector");
    double s = 0.0;
    for (double x : f) s += x;
    return s / static_cast<double>(f.size());
}

GridFunction forward_diff(std::span<const double> f) {
    const std::size_t n = f.size();
    const double dn = static_cast<double>(n);
    GridFunction out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = dn * (f[(k + 1) % n] - f[k]);
    return out;
}

GridFunction backward_diff(std::span<const double> f) {
    const std::size_t n = f.size();
    const double dn = static_cast<double>(n);
    GridFunction out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = dn * (f[k] - f[(k + n - 1) % n]);
    return out;
}

GridFunction laplacian(std::span<const double> f) {
    const std::size_t n = f.size();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    GridFunction out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = n2 * (f[(k + n - 1) % n] - 2.0 * f[k] + f[(k + 1) % n]);
    return out;
}

double lp_norm(std::span<const double> f, double p) {
    if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "lp_norm: p must be >= 1");
    if (f.empty()) fail(ErrorCode::InvalidArgument, "lp_norm: empty vector");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : f) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    for (double x : f) s += std::pow(std::abs(x), p);
    return std::pow(s / static_cast<double>(f.size()), 1.0 / p);
}

GridFunction inv_laplacian(std::span<const double> f) {
    const std::size_t n = f.size();
    if (n == 0) fail(ErrorCode::InvalidArgument, "inv_laplacian: empty vector");
    const double fmax = lp_norm(f, std::numeric_limits<double>::infinity());
    const double fbar = mean(f);
    if (std::abs(fbar) > 1e-10 * fmax)
        fail(ErrorCode::Domain, "inv_laplacian: input is not mean-zero (mean " + std::to_string(fbar) + ")");
    GridFunction g(n, 0.0);
    if (fmax == 0.0 || n == 1) return g;

    // The periodic stencil annihilates constants. Pinning g_{N-1} = 0 removes the border column
    // and leaves a Dirichlet tridiagonal system on the first N-1 rows; the dropped row holds by
    // compatibility once the input is mean-zero.
    const std::size_t m = n - 1;
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    std::vector<double> sub(m, n2), diag(m, -2.0 * n2), sup(m, n2), rhs(m);
    for (std::size_t k = 0; k < m; ++k) rhs[k] = f[k] - fbar;
    std::vector<double> x = linalg::solve_tridiagonal(sub, diag, sup, rhs);
    for (std::size_t k = 0; k < m; ++k) g[k] = x[k];
    const double gbar = mean(g);
    for (std::size_t k = 0; k < n; ++k) g[k] -= gbar;
    return g;
}

}  // namespace dlss
