#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dlss {

/// Real vector on the periodic grid T_N, index k read modulo N.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::size_t n, double fill = 0.0) : values_(n, fill) {}
    explicit GridFunction(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double cyclic(std::ptrdiff_t k) const;

    const std::vector<double>& vector() const noexcept { return values_; }
    std::vector<double>& vector() noexcept { return values_; }
    operator std::span<const double>() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

/// Nonnegative density on T_N. Entries are immutable once validated.
class GridState {
public:
    GridState() = default;
    /// Throws InvalidArgument on an empty vector, a negative or a non-finite entry.
    explicit GridState(std::vector<double> values);

    static GridState uniform(std::size_t n, double value = 1.0);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }
    double cyclic(std::ptrdiff_t k) const;
    const std::vector<double>& vector() const noexcept { return values_; }
    operator std::span<const double>() const noexcept { return values_; }

    double mass() const;  // (1/N) sum c_k
    double min() const;
    bool strictly_positive() const { return min() > 0.0; }

private:
    std::vector<double> values_;
};

inline std::size_t wrap(std::ptrdiff_t k, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((k % m) + m) % m);
}

double inner_product(std::span<const double> v, std::span<const double> w);
double mean(std::span<const double> f);

GridFunction forward_diff(std::span<const double> f);   // N (f_{k+1} - f_k)
GridFunction backward_diff(std::span<const double> f);  // N (f_k - f_{k-1})
GridFunction laplacian(std::span<const double> f);      // N^2 (f_{k-1} - 2 f_k + f_{k+1})

/// Discrete L^p_N norm. p may be +infinity.
double lp_norm(std::span<const double> f, double p);

/// Mean-zero solution g of laplacian(g) = f. Rejects inputs whose mean exceeds 1e-10 * max|f|.
GridFunction inv_laplacian(std::span<const double> f);

}  // namespace dlss
