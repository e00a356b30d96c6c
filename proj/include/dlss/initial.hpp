#pragma once

#include <cstddef>
#include <vector>

namespace dlss {

/// c_k = max{0, 1 - ((N/2 - k)/(ell N))^2}, k = 0..N-1; rescaled to mean 1 when normalize is set.
std::vector<double> bump_profile(std::size_t n, double ell = 0.1, bool normalize = true);

/// c_k = 1 + amplitude sin(2 pi mode (k + 1/2) / N); mean 1 whenever N does not divide mode.
std::vector<double> perturbed_uniform(std::size_t n, double amplitude = 0.5, int mode = 1);

}  // namespace dlss
