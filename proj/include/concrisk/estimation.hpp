#pragma once

#include "concrisk/portfolio.hpp"
#include "concrisk/ratings.hpp"
#include "concrisk/riskparams.hpp"
#include "concrisk/yieldcurve.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace concrisk {

// One cohort-year of default history: n_t borrowers observed, k_t defaulted.
struct CohortYear {
    int year = 0;
    std::int64_t cohort_size = 0;
    std::int64_t defaults = 0;
};

// Historical default-rate sample used by the correlation estimators.
struct DefaultRateSeries {
    std::vector<CohortYear> years;

    // 0 <= k_t <= n_t, n_t > 0, and at least 10 years of history.
    void validate() const;
    std::vector<double> rates() const;  // k_t / n_t per year
    double mean_rate() const;
};

// CSV columns: year, cohort_size, defaults.
DefaultRateSeries load_default_series(const std::string& path);

enum class RhoMethod { Mle, Mom, BetaMatch };

struct CorrelationEstimate {
    double rho_hat = 0.0;
    double pd_hat = 0.0;
    RhoMethod method = RhoMethod::Mle;
    // MLE: maximized total log-likelihood. MoM / beta-match: absolute residual
    // of the matched moment equation at rho_hat.
    double diagnostic = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Joint (PD, rho) maximum likelihood under the one-factor default-count
// model: per year the default count is Binomial(n_t, pi(x)) with
// pi(x) = Phi((Phi^-1(PD) - sqrt(rho)*x) / sqrt(1-rho)) and x ~ N(0,1)
// integrated out by 64-node Gauss-Hermite quadrature. The optimizer is
// Nelder-Mead on logit-transformed coordinates, which keeps both parameters
// inside (0,1) without explicit constraints.
CorrelationEstimate estimate_rho_mle(const DefaultRateSeries& series);

// Method of moments: PD_hat is the mean default rate; rho solves
// Phi2(c, c; rho) = PD_hat^2 + adjusted variance, c = Phi^-1(PD_hat), where
// the adjustment subtracts the binomial sampling noise mean(PD(1-PD)/n_t)
// from the raw rate variance. Errors when no systematic variance remains.
CorrelationEstimate estimate_rho_mom(const DefaultRateSeries& series);

// Equicorrelated bivariate normal joint CDF on the diagonal,
// Phi2(c, c; rho) = E[ Phi((c - sqrt(rho) X)/sqrt(1-rho))^2 ], by adaptive
// 1-D quadrature. Exposed because the MoM solver pivots on it.
double phi2_equicorr(double c, double rho);

// Unexpected-loss matching: fit a Beta distribution to the first two moments
// of the loss rates (default rates times elgd), read the empirical UL as the
// Beta q-quantile minus the mean, and solve for the rho whose one-factor UL
// elgd*(conditional_pd(PD_hat, rho, q) - PD_hat) reproduces it.
CorrelationEstimate estimate_rho_beta_match(const DefaultRateSeries& series,
                                            double elgd, double q);

struct XiCalibration {
    double xi_star = 0.0;
    double mse = 0.0;                 // mean squared deviation at xi_star
    std::vector<double> ga_target;    // reference GA per portfolio
    std::vector<double> ga_at_star;   // analytic GA per portfolio at xi_star
    std::vector<double> residuals;    // ga_at_star - ga_target
};

// Mean squared deviation of the analytic GA (at the given xi) from the
// reference GAs across portfolios; the objective calibrate_xi minimizes.
double xi_objective(const std::vector<Portfolio>& portfolios, const TransitionMatrix& tm,
                    const RiskParams& params, const std::vector<double>& reference_ga,
                    double xi);

// Precision parameter of the systematic gamma factor fitted so the analytic
// GA tracks a reference GA across portfolios: coarse geometric grid over
// [0.005, 2] then golden-section refinement. When reference_ga is null the
// targets are the Monte Carlo mark-to-market GAs (ratings state space),
// computed once with the seed fixed in params; tests inject analytic targets.
XiCalibration calibrate_xi(const std::vector<Portfolio>& portfolios,
                           const TransitionMatrix& tm, const NssParams& curve,
                           const RiskParams& params,
                           const std::vector<double>* reference_ga = nullptr);

}  // namespace concrisk
