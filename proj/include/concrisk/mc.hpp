#pragma once

#include "concrisk/mtm.hpp"
#include "concrisk/portfolio.hpp"
#include "concrisk/ratings.hpp"
#include "concrisk/riskparams.hpp"
#include "concrisk/yieldcurve.hpp"

#include <cstdint>
#include <vector>

namespace concrisk {

// Simulation result for a quantile-type statistic, in fractions of total
// exposure. ci95 is the binomial order-statistic bracket mapped through the
// sorted sample; std_error is its half-width over 2*z_0.975.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t scenarios_used = 0;
};

// Standard error of the ceil(q*n) order statistic of an ascending sample of
// at least 10,000 points. Throws when the 95% index bracket leaves the
// sample (q too extreme for the sample size).
double quantile_std_error(const std::vector<double>& sorted_losses, double q);

// Loss-rate VaR of the one-period default-mode model: factor draw, latent
// returns, default indicators, Beta LGD when nu > 0.
McEstimate simulate_actuarial_var(const Portfolio& p, const TransitionMatrix& tm,
                                  const RiskParams& params);

// Exact granularity adjustment: simulated VaR minus the asymptotic
// systematic loss at the same level (deterministic subtrahend, so the
// standard error is the VaR's).
McEstimate ga_mc_actuarial(const Portfolio& p, const TransitionMatrix& tm,
                           const RiskParams& params);

// Exact granularity adjustment in the revaluation model:
// df * [sum_n a_n mu_n(x*) + VaR_q(-R)] with x* the 1-q factor quantile.
McEstimate ga_mc_mtm(const MtmModel& model, const RiskParams& params);
McEstimate ga_mc_mtm(const Portfolio& p, const TransitionMatrix& tm,
                     const NssParams& curve, const RiskParams& params,
                     StateSpace space);

}  // namespace concrisk
