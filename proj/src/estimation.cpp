#include "concrisk/estimation.hpp"

#include "concrisk/csv.hpp"
#include "concrisk/ga_analytic.hpp"
#include "concrisk/irb.hpp"
#include "concrisk/mathx.hpp"
#include "concrisk/mc.hpp"
#include "concrisk/mtm.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace concrisk {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

void DefaultRateSeries::validate() const {
    if (years.size() < 10)
        throw std::invalid_argument("default-rate series: need at least 10 years, got " +
                                    std::to_string(years.size()));
    for (const auto& y : years) {
        if (y.cohort_size <= 0)
            throw std::invalid_argument("default-rate series: year " + std::to_string(y.year) +
                                        " has non-positive cohort size");
        if (y.defaults < 0 || y.defaults > y.cohort_size)
            throw std::invalid_argument("default-rate series: year " + std::to_string(y.year) +
                                        " has default count outside [0, cohort size]");
    }
}

std::vector<double> DefaultRateSeries::rates() const {
    std::vector<double> r;
    r.reserve(years.size());
    for (const auto& y : years) r.push_back(double(y.defaults) / double(y.cohort_size));
    return r;
}

double DefaultRateSeries::mean_rate() const {
    KahanSum s;
    for (const auto& y : years) s.add(double(y.defaults) / double(y.cohort_size));
    return s.value() / double(years.size());
}

DefaultRateSeries load_default_series(const std::string& path) {
    const CsvTable t = read_csv(path);
    const int cy = t.require_column("year");
    const int cn = t.require_column("cohort_size");
    const int ck = t.require_column("defaults");
    DefaultRateSeries s;
    s.years.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        const std::string ctx = path + " row " + std::to_string(i + 1);
        CohortYear y;
        y.year = int(parse_long(row[cy], ctx + " year"));
        y.cohort_size = parse_long(row[cn], ctx + " cohort_size");
        y.defaults = parse_long(row[ck], ctx + " defaults");
        s.years.push_back(y);
    }
    s.validate();
    return s;
}

CorrelationEstimate estimate_rho_mle(const DefaultRateSeries& series) {
    series.validate();
    bool any_interior = false;
    for (const auto& y : series.years)
        if (y.defaults > 0 && y.defaults < y.cohort_size) any_interior = true;
    if (!any_interior)
        throw std::invalid_argument(
            "estimate_rho_mle: every year is all-zero or all-default; "
            "the likelihood carries no correlation information");

    static const GaussHermite gh = gauss_hermite(64);
    const std::size_t nn = gh.nodes.size();
    // Gaussian-free log weights ln(w_i) + t_i^2 for the recentered rule
    std::vector<double> lw(nn);
    for (std::size_t i = 0; i < nn; ++i)
        lw[i] = std::log(gh.weights[i]) + gh.nodes[i] * gh.nodes[i];
    const double sqrt2 = std::sqrt(2.0);
    const double half_log_2pi = 0.9189385332046727;

    const std::size_t T = series.years.size();
    std::vector<double> log_choose(T);
    for (std::size_t t = 0; t < T; ++t) {
        const double n = double(series.years[t].cohort_size);
        const double k = double(series.years[t].defaults);
        log_choose[t] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    }

    // Total log-likelihood. Each year's integrand concentrates on an
    // O(n^-1/2)-wide window in x once cohorts are large, far narrower than
    // the fixed Gauss-Hermite node spacing, so the 64-node rule is applied
    // after recentering at the integrand's mode and rescaling by the
    // curvature there; the mixture integral is then summed in log space so
    // deep-tail nodes cannot underflow a year to zero.
    std::vector<double> lbuf(nn);
    auto loglik = [&](double pd, double rho) {
        const double c = normal_quantile(pd);
        const double sr = std::sqrt(rho), s1r = std::sqrt(1.0 - rho);
        const double s = sr / s1r;  // |dPhi^-1(pi)/dx|
        KahanSum total;
        for (std::size_t t = 0; t < T; ++t) {
            const double n = double(series.years[t].cohort_size);
            const double k = double(series.years[t].defaults);
            // h(x) = k ln pi(x) + (n-k) ln(1-pi(x)) - x^2/2; Newton for the
            // mode from the x that reproduces the continuity-corrected rate
            double mode = 0.0;
            if (sr > 0.0)
                mode = std::clamp((c - s1r * normal_quantile((k + 0.5) / (n + 1.0))) / sr,
                                  -12.0, 12.0);
            double hpp = -1.0;
            for (int it = 0; it < 60; ++it) {
                const double u = (c - sr * mode) / s1r;
                const double pi = std::clamp(normal_cdf(u), 1e-300, 1.0 - 1e-16);
                const double p1 = -s * normal_pdf(u);
                const double p2 = -s * s * u * normal_pdf(u);
                const double g1 = k / pi - (n - k) / (1.0 - pi);
                const double g2 = -k / (pi * pi) - (n - k) / ((1.0 - pi) * (1.0 - pi));
                const double hp = g1 * p1 - mode;
                hpp = std::min(g2 * p1 * p1 + g1 * p2 - 1.0, -1e-8);
                const double step = std::clamp(-hp / hpp, -2.0, 2.0);
                mode += step;
                if (std::abs(step) < 1e-11) break;
            }
            const double sigma = 1.0 / std::sqrt(-hpp);
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < nn; ++i) {
                const double x = mode + sqrt2 * sigma * gh.nodes[i];
                const double pi =
                    std::clamp(normal_cdf((c - sr * x) / s1r), 1e-300, 1.0 - 1e-16);
                const double l =
                    k * std::log(pi) + (n - k) * std::log1p(-pi) - 0.5 * x * x + lw[i];
                lbuf[i] = l;
                if (l > m) m = l;
            }
            KahanSum acc;
            for (std::size_t i = 0; i < nn; ++i) acc.add(std::exp(lbuf[i] - m));
            total.add(log_choose[t] - half_log_2pi + std::log(sqrt2 * sigma) + m +
                      std::log(acc.value()));
        }
        return total.value();
    };

    const double pd0 = std::clamp(series.mean_rate(), 1e-5, 1.0 - 1e-5);
    auto neg = [&](const std::vector<double>& z) {
        const double pd = std::clamp(sigmoid(z[0]), 1e-12, 1.0 - 1e-12);
        const double rho = std::clamp(sigmoid(z[1]), 1e-10, 1.0 - 1e-10);
        return -loglik(pd, rho);
    };
    const NelderMeadResult opt = nelder_mead(neg, {logit(pd0), logit(0.15)}, 0.75, 2000, 1e-13);
    if (!opt.converged)
        throw std::runtime_error("estimate_rho_mle: optimizer did not converge");

    CorrelationEstimate est;
    est.method = RhoMethod::Mle;
    est.pd_hat = std::clamp(sigmoid(opt.x[0]), 1e-12, 1.0 - 1e-12);
    est.rho_hat = std::clamp(sigmoid(opt.x[1]), 1e-10, 1.0 - 1e-10);
    est.diagnostic = -opt.fmin;
    est.converged = opt.converged;
    est.iterations = opt.iterations;
    return est;
}

double phi2_equicorr(double c, double rho) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("phi2_equicorr: rho must lie in [0,1)");
    const double p = normal_cdf(c);
    if (rho == 0.0) return p * p;
    const double sr = std::sqrt(rho), s1r = std::sqrt(1.0 - rho);
    auto f = [&](double x) {
        const double u = normal_cdf((c - sr * x) / s1r);
        return normal_pdf(x) * u * u;
    };
    // truncation at |x| = 10 is below 1e-22 in absolute terms
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, -10.0, 10.0, 12,
                                                                         1e-12);
}

CorrelationEstimate estimate_rho_mom(const DefaultRateSeries& series) {
    series.validate();
    const std::vector<double> r = series.rates();
    const std::size_t T = r.size();
    const double pd = series.mean_rate();

    KahanSum ss;
    for (double x : r) ss.add((x - pd) * (x - pd));
    const double raw_var = ss.value() / double(T - 1);
    KahanSum noise_sum;
    for (const auto& y : series.years)
        noise_sum.add(pd * (1.0 - pd) / double(y.cohort_size));
    const double noise = noise_sum.value() / double(T);
    const double adj_var = raw_var - noise;
    if (!(adj_var > 0.0))
        throw std::invalid_argument(
            "estimate_rho_mom: rate variance does not exceed the binomial sampling floor; "
            "no systematic variance to attribute");

    const double c = normal_quantile(pd);
    const double target = pd * pd + adj_var;
    auto f = [&](double rho) { return phi2_equicorr(c, rho) - target; };

    double lo = 1e-4, hi = 0.99;
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo >= 0.0)
        throw std::invalid_argument("estimate_rho_mom: implied correlation below 1e-4");
    if (fhi <= 0.0)
        throw std::invalid_argument("estimate_rho_mom: implied correlation above 0.99");
    int it = 0;
    while (hi - lo > 1e-12 && it < 200) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        ++it;
    }

    CorrelationEstimate est;
    est.method = RhoMethod::Mom;
    est.pd_hat = pd;
    est.rho_hat = 0.5 * (lo + hi);
    est.diagnostic = std::abs(f(est.rho_hat));
    est.converged = true;
    est.iterations = it;
    return est;
}

CorrelationEstimate estimate_rho_beta_match(const DefaultRateSeries& series, double elgd,
                                            double q) {
    series.validate();
    if (!(elgd > 0.0 && elgd <= 1.0))
        throw std::invalid_argument("estimate_rho_beta_match: elgd must lie in (0,1]");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("estimate_rho_beta_match: q must lie in (0,1)");

    const std::vector<double> r = series.rates();
    const std::size_t T = r.size();
    const double pd = series.mean_rate();
    const double m = pd * elgd;
    KahanSum ss;
    for (double x : r) ss.add((x * elgd - m) * (x * elgd - m));
    const double v = ss.value() / double(T - 1);
    if (!(m > 0.0))
        throw std::invalid_argument("estimate_rho_beta_match: loss-rate mean must be positive");
    if (!(v > 0.0))
        throw std::invalid_argument(
            "estimate_rho_beta_match: loss-rate variance must be positive");
    if (!(v < m * (1.0 - m)))
        throw std::invalid_argument(
            "estimate_rho_beta_match: loss-rate variance too large for a Beta moment fit");

    const double common = m * (1.0 - m) / v - 1.0;
    const double a = m * common, b = (1.0 - m) * common;
    const double ul_emp = beta_dist_quantile(a, b, q) - m;
    if (!(ul_emp > 0.0))
        throw std::invalid_argument(
            "estimate_rho_beta_match: empirical unexpected loss is not positive at q=" +
            std::to_string(q));

    auto g = [&](double rho) {
        return elgd * (conditional_pd(pd, rho, q) - pd) - ul_emp;
    };
    double lo = 1e-6, hi = 1.0 - 1e-6;
    double glo = g(lo);
    const double ghi = g(hi);
    if ((glo > 0.0) == (ghi > 0.0))
        throw std::runtime_error(
            "estimate_rho_beta_match: no correlation in (0,1) reproduces the empirical "
            "unexpected loss");
    int it = 0;
    while (hi - lo > 1e-12 && it < 200) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        ++it;
    }

    CorrelationEstimate est;
    est.method = RhoMethod::BetaMatch;
    est.pd_hat = pd;
    est.rho_hat = 0.5 * (lo + hi);
    est.diagnostic = std::abs(g(est.rho_hat));
    est.converged = true;
    est.iterations = it;
    return est;
}

double xi_objective(const std::vector<Portfolio>& portfolios, const TransitionMatrix& tm,
                    const RiskParams& params, const std::vector<double>& reference_ga,
                    double xi) {
    if (reference_ga.size() != portfolios.size())
        throw std::invalid_argument("xi_objective: one reference GA per portfolio required");
    RiskParams p = params;
    p.xi = xi;
    KahanSum sse;
    for (std::size_t i = 0; i < portfolios.size(); ++i) {
        const double ga = ga_approx(portfolios[i], tm, p).ga_full;
        if (!std::isfinite(ga))
            throw std::runtime_error("xi_objective: non-finite analytic GA for portfolio " +
                                     std::to_string(i));
        const double d = ga - reference_ga[i];
        sse.add(d * d);
    }
    return sse.value() / double(portfolios.size());
}

XiCalibration calibrate_xi(const std::vector<Portfolio>& portfolios,
                           const TransitionMatrix& tm, const NssParams& curve,
                           const RiskParams& params,
                           const std::vector<double>* reference_ga) {
    if (portfolios.empty())
        throw std::invalid_argument("calibrate_xi: at least one portfolio required");
    params.validate();

    XiCalibration cal;
    if (reference_ga) {
        if (reference_ga->size() != portfolios.size())
            throw std::invalid_argument(
                "calibrate_xi: one reference GA per portfolio required");
        cal.ga_target = *reference_ga;
    } else {
        // one simulation per portfolio, seed fixed by params; the search below
        // then reuses these targets so every objective call sees the same data
        cal.ga_target.reserve(portfolios.size());
        for (const auto& p : portfolios)
            cal.ga_target.push_back(
                ga_mc_mtm(p, tm, curve, params, StateSpace::Ratings).value);
    }
    for (std::size_t i = 0; i < cal.ga_target.size(); ++i)
        if (!std::isfinite(cal.ga_target[i]))
            throw std::runtime_error("calibrate_xi: non-finite reference GA for portfolio " +
                                     std::to_string(i));

    auto obj = [&](double xi) {
        return xi_objective(portfolios, tm, params, cal.ga_target, xi);
    };

    // coarse geometric grid over the admissible bracket, then golden-section
    // refinement in log(xi) on the two cells around the grid minimum
    const double xi_lo = 0.005, xi_hi = 2.0;
    const int ngrid = 33;
    std::vector<double> grid(ngrid);
    int best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ngrid; ++i) {
        grid[i] = xi_lo * std::pow(xi_hi / xi_lo, double(i) / double(ngrid - 1));
        const double fi = obj(grid[i]);
        if (fi < fbest) {
            fbest = fi;
            best = i;
        }
    }
    double a = std::log(grid[best > 0 ? best - 1 : 0]);
    double b = std::log(grid[best + 1 < ngrid ? best + 1 : ngrid - 1]);
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = obj(std::exp(x1)), f2 = obj(std::exp(x2));
    while (b - a > 1e-7) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = obj(std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = obj(std::exp(x2));
        }
    }
    cal.xi_star = std::exp(0.5 * (a + b));
    cal.mse = obj(cal.xi_star);

    RiskParams pstar = params;
    pstar.xi = cal.xi_star;
    cal.ga_at_star.reserve(portfolios.size());
    cal.residuals.reserve(portfolios.size());
    for (std::size_t i = 0; i < portfolios.size(); ++i) {
        cal.ga_at_star.push_back(ga_approx(portfolios[i], tm, pstar).ga_full);
        cal.residuals.push_back(cal.ga_at_star[i] - cal.ga_target[i]);
    }
    return cal;
}

}  // namespace concrisk
