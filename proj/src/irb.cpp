#include "concrisk/irb.hpp"

#include "concrisk/mathx.hpp"

#include <cmath>
#include <stdexcept>

namespace concrisk {

double asset_correlation_irb(double pd) {
    const double p = clamp_pd(pd);
    const double w = -std::expm1(-50.0 * p) / -std::expm1(-50.0);
    return 0.12 * w + 0.24 * (1.0 - w);
}

double conditional_pd(double pd, double rho, double q) {
    const double p = clamp_pd(pd);
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("conditional_pd: rho must be in [0,1)");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("conditional_pd: q must be in (0,1)");
    if (rho == 0.0) return p;
    const double z = (normal_quantile(p) + std::sqrt(rho) * normal_quantile(q)) /
                     std::sqrt(1.0 - rho);
    return normal_cdf(z);
}

double maturity_slope(double pd) {
    const double p = clamp_pd(pd);
    const double t = 0.11852 - 0.05478 * std::log(p);
    return t * t;
}

double maturity_adjustment(double pd, double maturity, bool clamp_five) {
    double m = maturity < 1.0 ? 1.0 : maturity;
    if (clamp_five && m > 5.0) m = 5.0;
    if (m == 1.0) return 1.0;
    const double b = maturity_slope(pd);
    const double denom = 1.0 - 1.5 * b;
    // b >= 2/3 happens only below pd ~ 3e-6, outside any rating-implied PD
    if (denom <= 0.0)
        throw std::domain_error("maturity_adjustment: pd too small, 1 - 1.5*b(pd) <= 0");
    return (1.0 + (m - 2.5) * b) / denom;
}

IrbOutputs capital_and_reserve(const IrbInputs& in, double q) {
    IrbOutputs out;
    out.pd = clamp_pd(in.pd);
    out.elgd = in.elgd;
    out.rho = in.rho_mode == RhoMode::Irb ? asset_correlation_irb(out.pd) : in.rho_fixed;
    out.cond_pd = conditional_pd(out.pd, out.rho, q);
    out.ma = maturity_adjustment(out.pd, in.maturity, in.ma_clamp);
    out.K = (in.elgd * out.cond_pd - out.pd * in.elgd) * out.ma;
    out.R = in.elgd * out.pd;
    return out;
}

std::vector<IrbOutputs> irb_outputs(const Portfolio& p, const TransitionMatrix& tm,
                                    const RiskParams& params) {
    params.validate();
    std::vector<IrbOutputs> out;
    out.reserve(p.size());
    for (const auto& pos : p.positions()) {
        IrbInputs in;
        in.pd = tm.default_prob(pos.grade);
        in.elgd = pos.elgd.value_or(params.elgd);
        in.maturity = pos.maturity;
        in.rho_mode = params.rho_mode;
        in.rho_fixed = params.rho_fixed;
        in.ma_clamp = params.ma_clamp;
        out.push_back(capital_and_reserve(in, params.q));
    }
    return out;
}

// deliberately not routed through irb_outputs: the expected-loss term has no
// maturity dimension, and the maturity adjustment is undefined for near-zero
// pds that are perfectly fine here
double asymptotic_el(const Portfolio& p, const TransitionMatrix& tm,
                     const RiskParams& params) {
    params.validate();
    KahanSum s;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const auto& pos = p.positions()[n];
        const double pd = clamp_pd(tm.default_prob(pos.grade));
        const double rho = params.rho_mode == RhoMode::Irb ? asset_correlation_irb(pd)
                                                           : params.rho_fixed;
        const double elgd = pos.elgd.value_or(params.elgd);
        s.add(p.shares()[n] * elgd * conditional_pd(pd, rho, params.q));
    }
    return s.value();
}

}  // namespace concrisk
