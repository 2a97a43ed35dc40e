#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace concrisk {

// Standard normal distribution. The quantile contract (|err| <= 1e-10 on
// quantiles mapping into [-8, 8]) is relied on by every module that inverts
// default probabilities, so both directions are kept independent of each
// other: the CDF goes through erfc, the quantile through the PPND16
// rational approximation.
double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);

// Probabilities are floored/capped before quantile inversion wherever a
// model PD can legitimately sit at 0 or 1 (for example rating-grade PDs).
inline constexpr double kPdFloor = 1e-6;
inline constexpr double kPdCap = 1.0 - 1e-6;
double clamp_pd(double pd);

// Gauss-Hermite rule for weight exp(-t^2), nodes ascending.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermite gauss_hermite(int n);

// E[f(Z)] for standard normal Z, via a Gauss-Hermite rule.
double expect_normal(const GaussHermite& gh, const std::function<double(double)>& f);

// Regularized lower incomplete gamma P(a, x) and the q-quantile of a
// Gamma(shape, scale) distribution, the latter by bracketed root finding
// on P to 1e-10 relative tolerance.
double gamma_p(double a, double x);
double gamma_dist_quantile(double shape, double scale, double q);

// q-quantile of a Beta(a, b) distribution.
double beta_dist_quantile(double a, double b, double q);

// Bracketed root finding: f(lo) and f(hi) must straddle zero.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-12);

// Derivative-free simplex minimizer.
struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, double step,
                             int max_iter = 2000, double ftol = 1e-12);

// Neumaier-compensated accumulator; order of adds is the caller's contract.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            c_ += (sum_ - t) + x;
        else
            c_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

  private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

}  // namespace concrisk
