#pragma once

#include "concrisk/portfolio.hpp"
#include "concrisk/ratings.hpp"
#include "concrisk/riskparams.hpp"

#include <vector>

namespace concrisk {

// Basel IRB asset correlation: rho = 0.12*w + 0.24*(1-w),
// w = (1 - exp(-50*pd)) / (1 - exp(-50)). Decreasing from 0.24 to 0.12.
double asset_correlation_irb(double pd);

// Vasicek conditional default probability at the q-quantile of the factor:
// Phi((Phi^-1(pd) + sqrt(rho)*Phi^-1(q)) / sqrt(1-rho)).
double conditional_pd(double pd, double rho, double q);

// Regression coefficient b(pd) = (0.11852 - 0.05478*ln pd)^2 in the
// maturity adjustment.
double maturity_slope(double pd);

// MA = (1 + (m-2.5)*b) / (1 - 1.5*b). Maturity is clamped below at 1 year
// always; the cap at 5 years is a switch. Identically 1 at m = 1.
double maturity_adjustment(double pd, double maturity, bool clamp_five = true);

struct IrbOutputs {
    double pd = 0.0;       // resolved one-year PD (floored)
    double elgd = 0.0;     // resolved expected LGD
    double rho = 0.0;      // asset correlation
    double cond_pd = 0.0;  // PD conditional on the q-quantile factor draw
    double ma = 1.0;       // maturity adjustment
    double K = 0.0;        // UL capital requirement
    double R = 0.0;        // EL reserve requirement
};

struct IrbInputs {
    double pd = 0.0;
    double elgd = 0.45;
    double maturity = 1.0;
    RhoMode rho_mode = RhoMode::Irb;
    double rho_fixed = 0.35;
    bool ma_clamp = true;
};

// K = (ELGD*cond_pd - PD*ELGD)*MA, R = ELGD*PD.
IrbOutputs capital_and_reserve(const IrbInputs& in, double q);

// Per-borrower IRB quantities for a whole portfolio; PDs come from the
// transition matrix default column at the borrower grade.
std::vector<IrbOutputs> irb_outputs(const Portfolio& p, const TransitionMatrix& tm,
                                    const RiskParams& params);

// Exposure-weighted conditional expected loss at the q-quantile,
// sum_n a_n * ELGD_n * cond_pd_n. The systematic part of VaR.
double asymptotic_el(const Portfolio& p, const TransitionMatrix& tm,
                     const RiskParams& params);

}  // namespace concrisk
