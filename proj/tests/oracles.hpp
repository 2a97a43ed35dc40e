#pragma once

// Test-side reference routines, deliberately kept independent of the library
// implementation paths they check.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace orc {

// Normal CDF by composite Simpson integration of the density from 0 to |x|.
inline double norm_cdf_simpson(double x) {
    const double ax = std::fabs(x);
    const int n = 4096;  // even
    const double h = ax / n;
    auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
    double s = pdf(0.0) + pdf(ax);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
    const double half = s * h / 3.0;
    return x >= 0.0 ? 0.5 + half : 0.5 - half;
}

// Normal quantile by bisection on erfc, independent of the rational
// approximation used by the library.
inline double norm_quantile_bisect(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p out of range");
    auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Plain dense row-major matrix product for transition-matrix power checks.
inline std::vector<double> mat_mult(const std::vector<double>& a,
                                    const std::vector<double>& b, std::size_t n) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

}  // namespace orc
