#pragma once

#include "concrisk/irb.hpp"
#include "concrisk/portfolio.hpp"
#include "concrisk/riskparams.hpp"

#include <vector>

namespace concrisk {

// q-quantile of a Gamma factor with mean 1 and variance 1/xi
// (shape xi, scale 1/xi).
double gamma_factor_quantile(double xi, double q);

// delta = (a-1)*(xi + (1-xi)/a) evaluated at a = gamma_factor_quantile(xi,q).
double delta_factor(double xi, double q);

struct GaAnalyticReport {
    double ga_full = 0.0;        // fraction of total EAD
    double ga_simplified = 0.0;  // fraction of total EAD
    double k_star = 0.0;         // sum a_n * K_n
    double delta = 0.0;
    std::vector<double> contrib_full;        // per-borrower summands of ga_full
    std::vector<double> contrib_simplified;  // per-borrower summands of ga_simplified
};

// CreditRisk+ granularity adjustment from precomputed per-borrower IRB
// quantities. The full version keeps all LGD variance terms; the simplified
// version drops terms of quadratic order in PD.
GaAnalyticReport ga_approx(const Portfolio& p, const std::vector<IrbOutputs>& irb,
                           const RiskParams& params);

// Convenience: resolve IRB quantities from the matrix, then ga_approx.
GaAnalyticReport ga_approx(const Portfolio& p, const TransitionMatrix& tm,
                           const RiskParams& params);

}  // namespace concrisk
