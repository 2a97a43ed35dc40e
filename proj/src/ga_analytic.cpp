#include "concrisk/ga_analytic.hpp"

#include "concrisk/mathx.hpp"

#include <cmath>
#include <stdexcept>

namespace concrisk {

double gamma_factor_quantile(double xi, double q) {
    if (!(xi > 0.0)) throw std::invalid_argument("gamma_factor_quantile: xi must be > 0");
    return gamma_dist_quantile(xi, 1.0 / xi, q);
}

double delta_factor(double xi, double q) {
    const double a = gamma_factor_quantile(xi, q);
    return (a - 1.0) * (xi + (1.0 - xi) / a);
}

GaAnalyticReport ga_approx(const Portfolio& p, const std::vector<IrbOutputs>& irb,
                           const RiskParams& params) {
    params.validate();
    if (irb.size() != p.size())
        throw std::invalid_argument("ga_approx: irb outputs do not match portfolio size");

    GaAnalyticReport rep;
    rep.delta = delta_factor(params.xi, params.q);

    KahanSum kstar;
    for (std::size_t n = 0; n < irb.size(); ++n) kstar.add(p.shares()[n] * irb[n].K);
    rep.k_star = kstar.value();
    if (!(rep.k_star > 0.0))
        throw std::invalid_argument("ga_approx: aggregate capital K* is zero");

    const double scale = 1.0 / (2.0 * rep.k_star);
    rep.contrib_full.resize(p.size());
    rep.contrib_simplified.resize(p.size());
    KahanSum full, simplified;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double a2 = p.shares()[n] * p.shares()[n];
        const double elgd = irb[n].elgd;
        if (elgd <= 0.0) {
            rep.contrib_full[n] = 0.0;
            rep.contrib_simplified[n] = 0.0;
            continue;
        }
        const double vlgd2 = params.nu * elgd * (1.0 - elgd);
        const double c = (vlgd2 + elgd * elgd) / elgd;
        const double kr = irb[n].K + irb[n].R;
        const double ratio = vlgd2 / (elgd * elgd);
        const double term_full =
            rep.delta * (c * kr + kr * kr * ratio) - irb[n].K * (c + 2.0 * kr * ratio);
        const double term_simplified = c * (rep.delta * kr - irb[n].K);
        rep.contrib_full[n] = scale * a2 * term_full;
        rep.contrib_simplified[n] = scale * a2 * term_simplified;
        full.add(rep.contrib_full[n]);
        simplified.add(rep.contrib_simplified[n]);
    }
    rep.ga_full = full.value();
    rep.ga_simplified = simplified.value();
    return rep;
}

GaAnalyticReport ga_approx(const Portfolio& p, const TransitionMatrix& tm,
                           const RiskParams& params) {
    return ga_approx(p, irb_outputs(p, tm, params), params);
}

}  // namespace concrisk
