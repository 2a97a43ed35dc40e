#include "concrisk/mathx.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace concrisk {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// PPND16 (Wichura's algorithm AS 241), relative error ~1e-15.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0,1), got " +
                                    std::to_string(p));
    const double q = p - 0.5;
    double r, num, den;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                    6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                  1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                    3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                  5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    x = num / den;
    return q < 0.0 ? -x : x;
}

double clamp_pd(double pd) {
    return std::clamp(pd, kPdFloor, kPdCap);
}

GaussHermite gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    const double eps = 1e-14;
    const double pim4 = 0.7511255444649425;  // pi^(-1/4)
    const int maxit = 20;
    GaussHermite gh;
    gh.nodes.assign(n, 0.0);
    gh.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        // initial guesses from the asymptotic node spacing
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(double(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * gh.nodes[n - 1];
        else if (i == 3)
            z = 1.91 * z - 0.91 * gh.nodes[n - 2];
        else
            z = 2.0 * z - gh.nodes[n - i + 1];
        int its = 0;
        for (; its < maxit; ++its) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt(double(j - 1) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= eps) break;
        }
        if (its == maxit)
            throw std::runtime_error("gauss_hermite: Newton iteration did not converge");
        gh.nodes[n - 1 - i] = z;
        gh.nodes[i] = -z;
        gh.weights[n - 1 - i] = 2.0 / (pp * pp);
        gh.weights[i] = gh.weights[n - 1 - i];
    }
    return gh;
}

double expect_normal(const GaussHermite& gh, const std::function<double(double)>& f) {
    const double inv_sqrt_pi = 0.5641895835477563;
    KahanSum s;
    const int n = int(gh.nodes.size());
    for (int i = 0; i < n; ++i)
        s.add(gh.weights[i] * f(kSqrt2 * gh.nodes[i]));
    return inv_sqrt_pi * s.value();
}

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_p: shape must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma_p: x must be non-negative");
    return boost::math::gamma_p(a, x);
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::runtime_error("find_root: bracket [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "] does not straddle a root (f=" +
                                 std::to_string(flo) + ", " + std::to_string(fhi) + ")");
    boost::math::tools::eps_tolerance<double> tol(
        std::max(1, int(-std::log2(rel_tol))));
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    if (max_iter >= 200)
        throw std::runtime_error("find_root: no convergence within iteration budget");
    return 0.5 * (r.first + r.second);
}

double gamma_dist_quantile(double shape, double scale, double q) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("gamma_dist_quantile: shape and scale must be positive");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("gamma_dist_quantile: q must lie in (0,1)");
    // bracket in standardized units, then refine P(shape, x) = q
    double lo = 1e-300, hi = shape + 1.0;
    while (gamma_p(shape, hi) < q) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("gamma_dist_quantile: bracket blew up");
    }
    double x = find_root([&](double t) { return gamma_p(shape, t) - q; }, lo, hi, 1e-10);
    return scale * x;
}

double beta_dist_quantile(double a, double b, double q) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("beta_dist_quantile: shapes must be positive");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("beta_dist_quantile: q must lie in (0,1)");
    return boost::math::ibeta_inv(a, b, q);
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, double step, int max_iter,
                             double ftol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    NelderMeadResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        // order: pts[lo] best, pts[hi] worst
        std::size_t lo = 0, hi = 0, next_hi = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            if (fv[i] < fv[lo]) lo = i;
            if (fv[i] > fv[hi]) hi = i;
        }
        for (std::size_t i = 0; i <= n; ++i)
            if (i != hi && fv[i] > fv[next_hi]) next_hi = i;
        if (std::abs(fv[hi] - fv[lo]) <=
            ftol * (std::abs(fv[hi]) + std::abs(fv[lo]) + 1e-30)) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == hi) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / double(n);
        }
        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + t * (pts[hi][j] - centroid[j]);
            return p;
        };
        auto refl = blend(-1.0);
        const double fr = f(refl);
        if (fr < fv[lo]) {
            auto exp_ = blend(-2.0);
            const double fe = f(exp_);
            if (fe < fr) {
                pts[hi] = std::move(exp_);
                fv[hi] = fe;
            } else {
                pts[hi] = std::move(refl);
                fv[hi] = fr;
            }
        } else if (fr < fv[next_hi]) {
            pts[hi] = std::move(refl);
            fv[hi] = fr;
        } else {
            auto con = blend(0.5);
            const double fc = f(con);
            if (fc < fv[hi]) {
                pts[hi] = std::move(con);
                fv[hi] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == lo) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = 0.5 * (pts[i][j] + pts[lo][j]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    std::size_t lo = 0;
    for (std::size_t i = 1; i <= pts.size() - 1; ++i)
        if (fv[i] < fv[lo]) lo = i;
    res.x = pts[lo];
    res.fmin = fv[lo];
    res.iterations = it;
    return res;
}

}  // namespace concrisk
