#include "concrisk/yieldcurve.hpp"

#include "concrisk/csv.hpp"
#include "concrisk/mathx.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace concrisk {

namespace {

double f1(double x) { return x < 1e-8 ? 1.0 - 0.5 * x : (1.0 - std::exp(-x)) / x; }
double f2(double x) { return f1(x) - std::exp(-x); }

// least-squares betas for fixed taus; returns sum of squared residuals,
// infinity when the normal equations are singular
double solve_betas(const CurveObservations& obs, double tau1, double tau2,
                   std::array<double, 4>& beta) {
    const std::size_t m = obs.maturities.size();
    double ata[4][4] = {};
    double atb[4] = {};
    for (std::size_t i = 0; i < m; ++i) {
        const double t = obs.maturities[i];
        const double row[4] = {1.0, f1(t / tau1), f2(t / tau1), f2(t / tau2)};
        for (int a = 0; a < 4; ++a) {
            atb[a] += row[a] * obs.rates[i];
            for (int b = 0; b < 4; ++b) ata[a][b] += row[a] * row[b];
        }
    }
    // gaussian elimination with partial pivoting
    int idx[4] = {0, 1, 2, 3};
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(ata[idx[r]][c]) > std::abs(ata[idx[piv]][c])) piv = r;
        std::swap(idx[c], idx[piv]);
        const double d = ata[idx[c]][c];
        if (std::abs(d) < 1e-14) return std::numeric_limits<double>::infinity();
        for (int r = c + 1; r < 4; ++r) {
            const double fac = ata[idx[r]][c] / d;
            for (int cc = c; cc < 4; ++cc) ata[idx[r]][cc] -= fac * ata[idx[c]][cc];
            atb[idx[r]] -= fac * atb[idx[c]];
        }
    }
    for (int c = 3; c >= 0; --c) {
        double v = atb[idx[c]];
        for (int cc = c + 1; cc < 4; ++cc) v -= ata[idx[c]][cc] * beta[cc];
        beta[c] = v / ata[idx[c]][c];
    }
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = obs.maturities[i];
        const double fit =
            beta[0] + beta[1] * f1(t / tau1) + beta[2] * f2(t / tau1) + beta[3] * f2(t / tau2);
        const double e = fit - obs.rates[i];
        ssr += e * e;
    }
    return ssr;
}

}  // namespace

double zero_rate(const NssParams& p, double t) {
    if (!(t > 0.0))
        throw std::invalid_argument("zero_rate: t must be positive");
    return p.beta0 + p.beta1 * f1(t / p.tau1) + p.beta2 * f2(t / p.tau1) +
           p.beta3 * f2(t / p.tau2);
}

double discount_factor(const NssParams& p, double t) {
    if (t < 0.0)
        throw std::invalid_argument("discount_factor: t must be >= 0");
    if (t == 0.0) return 1.0;
    return std::exp(-zero_rate(p, t) * t);
}

CurveObservations load_curve(const std::string& path) {
    const CsvTable t = read_csv(path);
    const int c_mat = t.require_column("maturity_years");
    const int c_rate = t.require_column("zero_rate");
    CurveObservations obs;
    for (const auto& row : t.rows) {
        obs.maturities.push_back(parse_double(row[c_mat], path + " maturity"));
        obs.rates.push_back(parse_double(row[c_rate], path + " rate"));
    }
    return obs;
}

CurveFit fit_nss(const CurveObservations& obs) {
    const std::size_t m = obs.maturities.size();
    if (m < 6)
        throw std::invalid_argument("fit_nss: need at least 6 observations, got " +
                                    std::to_string(m));
    if (obs.rates.size() != m)
        throw std::invalid_argument("fit_nss: maturity/rate size mismatch");
    std::set<double> distinct;
    for (double t : obs.maturities) {
        if (!(t > 0.0)) throw std::invalid_argument("fit_nss: maturities must be positive");
        distinct.insert(t);
    }
    if (distinct.size() != m)
        throw std::invalid_argument("fit_nss: duplicate maturities");

    const double grid[] = {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0};
    double best_ssr = std::numeric_limits<double>::infinity();
    double best_t1 = 1.0, best_t2 = 5.0;
    std::array<double, 4> beta{};
    for (double t1 : grid)
        for (double t2 : grid) {
            if (t1 == t2) continue;
            const double ssr = solve_betas(obs, t1, t2, beta);
            if (ssr < best_ssr) {
                best_ssr = ssr;
                best_t1 = t1;
                best_t2 = t2;
            }
        }
    if (!std::isfinite(best_ssr))
        throw std::runtime_error("fit_nss: grid search found no usable tau pair");

    auto objective = [&](const std::vector<double>& logtau) {
        const double t1 = std::exp(logtau[0]), t2 = std::exp(logtau[1]);
        if (t1 < 1e-3 || t2 < 1e-3 || t1 > 200.0 || t2 > 200.0 ||
            std::abs(t1 - t2) < 1e-8)
            return std::numeric_limits<double>::infinity();
        std::array<double, 4> b{};
        return solve_betas(obs, t1, t2, b);
    };
    const auto nm =
        nelder_mead(objective, {std::log(best_t1), std::log(best_t2)}, 0.25, 500, 1e-14);

    double t1 = best_t1, t2 = best_t2, ssr = best_ssr;
    if (nm.fmin < best_ssr) {
        t1 = std::exp(nm.x[0]);
        t2 = std::exp(nm.x[1]);
        ssr = nm.fmin;
    }
    solve_betas(obs, t1, t2, beta);
    CurveFit fit;
    fit.params = {beta[0], beta[1], beta[2], beta[3], t1, t2};
    fit.rmse = std::sqrt(ssr / double(m));
    return fit;
}

}  // namespace concrisk
