#include "dlss/initial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dlss/error.hpp"

namespace dlss {

std::vector<double> bump_profile(std::size_t n, double ell, bool normalize) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "bump: n must be positive");
    if (!(ell > 0.0) || !std::isfinite(ell)) fail(ErrorCode::InvalidArgument, "bump: ell must be positive");
    const double dn = static_cast<double>(n);
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double z = (0.5 * dn - static_cast<double>(k)) / (ell * dn);
        c[k] = std::max(0.0, 1.0 - z * z);
    }
    const double m = std::accumulate(c.begin(), c.end(), 0.0) / dn;
    if (!(m > 0.0)) fail(ErrorCode::InvalidArgument, "bump: profile is empty on this grid");
    if (normalize)
        for (double& v : c) v /= m;
    return c;
}

std::vector<double> perturbed_uniform(std::size_t n, double amplitude, int mode) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "perturbed-uniform: n must be positive");
    if (!(std::abs(amplitude) < 1.0)) fail(ErrorCode::InvalidArgument, "perturbed-uniform: need |amplitude| < 1");
    std::vector<double> c(n);
    const double dn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k)
        c[k] = 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * mode * (static_cast<double>(k) + 0.5) / dn);
    return c;
}

}  // namespace dlss
