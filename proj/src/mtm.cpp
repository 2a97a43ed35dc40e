#include "concrisk/mtm.hpp"

#include "concrisk/irb.hpp"
#include "concrisk/mathx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace concrisk {

namespace {
constexpr double kTimeTol = 1e-9;

double clip_unit(double p) {
    return std::min(1.0 - 1e-12, std::max(1e-12, p));
}
}  // namespace

std::vector<double> payment_schedule(double maturity, double accrual) {
    if (!(maturity > 0.0)) throw std::invalid_argument("payment_schedule: maturity <= 0");
    if (!(accrual > 0.0)) throw std::invalid_argument("payment_schedule: accrual <= 0");
    const int m = int(std::ceil(maturity / accrual - kTimeTol));
    std::vector<double> dates(m);
    for (int i = 0; i < m; ++i) dates[i] = maturity - (m - 1 - i) * accrual;
    return dates;
}

double rn_survival(const CumulativePdTable& pds, int grade, double u, double rho,
                   double psi) {
    if (u <= kTimeTol) return 1.0;
    const double p = pds.pd(grade, u);
    if (p <= 0.0) return 1.0;  // published zero entries: credit-risk-free
    if (p >= 1.0) return 0.0;
    return 1.0 - risk_neutral_pd(p, rho, u, psi);
}

double price_bond_t0(const BondSpec& spec, int grade, const NssParams& curve,
                     const CumulativePdTable& pds, double elgd, double psi, double rho) {
    const auto dates = payment_schedule(spec.maturity, spec.accrual);
    const double cpn = spec.coupon * spec.accrual;
    KahanSum price;
    double q_prev = 1.0;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const double u = dates[i];
        const double df = discount_factor(curve, u);
        const double q = rn_survival(pds, grade, u, rho, psi);
        price.add(cpn * df * q);
        price.add((1.0 - elgd) * df * (q_prev - q));
        q_prev = q;
    }
    price.add(discount_factor(curve, spec.maturity) *
              rn_survival(pds, grade, spec.maturity, rho, psi));
    return price.value();
}

double price_bond_tT(const BondSpec& spec, int grade_at_T, const NssParams& curve,
                     const CumulativePdTable& pds, double elgd, double psi, double rho) {
    const double T = spec.horizon;
    if (spec.maturity < T - kTimeTol)
        throw std::invalid_argument("price_bond_tT: bond matures before the horizon");
    const auto dates = payment_schedule(spec.maturity, spec.accrual);
    const double cpn = spec.coupon * spec.accrual;
    const double df_T = discount_factor(curve, T);

    // coupons received while alive up to the horizon, carried at the curve
    KahanSum value;
    for (double u : dates)
        if (u <= T + kTimeTol) value.add(cpn * discount_factor(curve, u) / df_T);

    if (spec.maturity <= T + kTimeTol) {
        value.add(1.0);  // matured at the horizon: principal, nothing left to price
        return value.value();
    }

    double q_prev = 1.0;  // survival measured from the horizon
    for (double u : dates) {
        if (u <= T + kTimeTol) continue;
        const double rel = u - T;
        const double df = discount_factor(curve, u) / df_T;
        const double q = rn_survival(pds, grade_at_T, rel, rho, psi);
        value.add(cpn * df * q);
        value.add((1.0 - elgd) * df * (q_prev - q));
        q_prev = q;
    }
    value.add(discount_factor(curve, spec.maturity) / df_T *
              rn_survival(pds, grade_at_T, spec.maturity - T, rho, psi));
    return value.value();
}

std::vector<double> state_probabilities(const ThresholdTable& thr, int grade, double rho,
                                        double x) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("state_probabilities: rho must be in [0,1)");
    const int states = thr.states();
    std::vector<double> out(states);
    const double shift = x * std::sqrt(rho);
    const double denom = std::sqrt(1.0 - rho);
    double prev = 0.0;
    for (int s = 0; s < states - 1; ++s) {
        const double c = normal_cdf((thr.cutoff(grade, s) - shift) / denom);
        out[s] = std::max(0.0, c - prev);
        prev = c;
    }
    out[states - 1] = std::max(0.0, 1.0 - prev);
    return out;
}

void state_probabilities_two(double pd, double rho, double x, double out[2]) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("state_probabilities_two: rho must be in [0,1)");
    const double c = normal_quantile(clip_unit(pd));
    const double z = (c - x * std::sqrt(rho)) / std::sqrt(1.0 - rho);
    out[0] = normal_cdf(z);
    out[1] = 1.0 - out[0];
}

MtmModel MtmModel::build(const Portfolio& p, const TransitionMatrix& tm,
                         const NssParams& curve, const RiskParams& params,
                         StateSpace space) {
    params.validate();
    const double T = params.horizon;

    const TransitionMatrix* horizon_tm = &tm;
    TransitionMatrix powered = tm;
    if (space == StateSpace::Ratings) {
        const double r = std::round(T);
        if (std::fabs(T - r) > kTimeTol || r < 1.0)
            throw std::invalid_argument(
                "MtmModel: ratings state space needs a whole-year horizon");
        if (r > 1.0) {
            powered = matrix_power(tm, int(r));
            horizon_tm = &powered;
        }
    }

    double max_tau = 1.0;
    for (const auto& pos : p.positions()) {
        if (pos.maturity < T - kTimeTol)
            throw std::invalid_argument("MtmModel: loan '" + pos.borrower_id +
                                        "' matures before the horizon");
        max_tau = std::max(max_tau, pos.maturity);
    }
    const CumulativePdTable pds(tm, max_tau + kTimeTol);

    MtmModel model{ThresholdTable(*horizon_tm)};
    model.space_ = space;
    model.nu_ = params.nu;
    model.df_T_ = discount_factor(curve, T);
    model.shares_ = p.shares();

    const std::size_t N = p.size();
    model.prices_.resize(N);
    model.ratios_.resize(N);
    model.rho_.resize(N);
    model.elgd_.resize(N);
    model.beta_a_.assign(N, 0.0);
    model.beta_b_.assign(N, 0.0);
    model.lgd_var_term_.assign(N, 0.0);
    model.cutoff_.assign(N, 0.0);
    model.grade_.resize(N);

    for (std::size_t n = 0; n < N; ++n) {
        const auto& pos = p.positions()[n];
        const double elgd = pos.elgd.value_or(params.elgd);
        const double pd1 = tm.default_prob(pos.grade);
        const double rho = params.rho_mode == RhoMode::Irb ? asset_correlation_irb(pd1)
                                                           : params.rho_fixed;
        double rho_rn = rho;  // pricing-transform correlation, factor loading stays rho
        if (params.rn_rho_mode == RnRhoMode::Irb) rho_rn = asset_correlation_irb(pd1);
        else if (params.rn_rho_mode == RnRhoMode::Fixed) rho_rn = params.rn_rho_fixed;
        BondSpec spec;
        spec.coupon = pos.coupon;
        spec.accrual = params.accrual;
        spec.maturity = pos.maturity;
        spec.horizon = T;

        StatePriceTable table;
        table.p0 = price_bond_t0(spec, pos.grade, curve, pds, elgd, params.psi, rho_rn);
        if (!(table.p0 > 0.0))
            throw std::invalid_argument("MtmModel: non-positive current price for '" +
                                        pos.borrower_id + "'");
        if (space == StateSpace::Ratings) {
            table.pT.resize(std::size_t(tm.states()));
            table.pT[0] = 1.0 - elgd;
            for (int s = 1; s < tm.states(); ++s)
                table.pT[std::size_t(s)] =
                    price_bond_tT(spec, s, curve, pds, elgd, params.psi, rho_rn);
        } else {
            table.pT = {1.0 - elgd,
                        price_bond_tT(spec, pos.grade, curve, pds, elgd, params.psi, rho_rn)};
            model.cutoff_[n] = normal_quantile(clip_unit(pds.pd(pos.grade, T)));
        }

        model.ratios_[n].resize(table.pT.size());
        for (std::size_t s = 0; s < table.pT.size(); ++s)
            model.ratios_[n][s] = table.pT[s] / table.p0;

        if (params.nu > 0.0 && elgd > 0.0 && elgd < 1.0) {
            const double vlgd2 = params.nu * elgd * (1.0 - elgd);
            model.lgd_var_term_[n] = vlgd2 / (table.p0 * table.p0);
            const double s = 1.0 / params.nu - 1.0;
            model.beta_a_[n] = elgd * s;
            model.beta_b_[n] = (1.0 - elgd) * s;
        }
        model.rho_[n] = rho;
        model.elgd_[n] = elgd;
        model.grade_[n] = pos.grade;
        model.prices_[n] = std::move(table);
    }

    const auto gh = gauss_hermite(64);
    model.expected_return_ =
        expect_normal(gh, [&](double x) { return model.moments(x).mu; });
    return model;
}

int MtmModel::bucket(std::size_t n, double y) const {
    if (space_ == StateSpace::Ratings) return thresholds_.bucket(grade_[n], y);
    return y <= cutoff_[n] ? 0 : 1;
}

double MtmModel::mu_single(std::size_t n, double x) const {
    const auto& r = ratios_[n];
    if (space_ == StateSpace::Ratings) {
        const auto pi = state_probabilities(thresholds_, grade_[n], rho_[n], x);
        double mu = 0.0;
        for (std::size_t s = 0; s < r.size(); ++s) mu += r[s] * pi[s];
        return mu;
    }
    const double rho = rho_[n];
    const double pi0 = normal_cdf((cutoff_[n] - x * std::sqrt(rho)) / std::sqrt(1.0 - rho));
    return r[0] * pi0 + r[1] * (1.0 - pi0);
}

ConditionalMoments MtmModel::moments(double x) const {
    ConditionalMoments out;
    out.mu_n.resize(ratios_.size());
    KahanSum mu_total, var_total;
    for (std::size_t n = 0; n < ratios_.size(); ++n) {
        const auto& r = ratios_[n];
        double pi_two[2];
        const double* pi;
        std::vector<double> pi_full;
        if (space_ == StateSpace::Ratings) {
            pi_full = state_probabilities(thresholds_, grade_[n], rho_[n], x);
            pi = pi_full.data();
        } else {
            const double rho = rho_[n];
            pi_two[0] =
                normal_cdf((cutoff_[n] - x * std::sqrt(rho)) / std::sqrt(1.0 - rho));
            pi_two[1] = 1.0 - pi_two[0];
            pi = pi_two;
        }
        double mu = 0.0, m2 = 0.0;
        for (std::size_t s = 0; s < r.size(); ++s) {
            mu += r[s] * pi[s];
            m2 += r[s] * r[s] * pi[s];
        }
        const double var_n = std::max(0.0, m2 - mu * mu) + lgd_var_term_[n] * pi[0];
        out.mu_n[n] = mu;
        mu_total.add(shares_[n] * mu);
        var_total.add(shares_[n] * shares_[n] * var_n);
    }
    out.mu = mu_total.value();
    out.var = df_T_ * df_T_ * var_total.value();
    return out;
}

namespace {
struct GaEval {
    double ga = 0.0;
    double m_prime = 0.0;
};

GaEval ga_second_order(const MtmModel& model, double x_star, double h) {
    // conditional mean loss and loss variance at the five stencil points
    double mu[5], var_lo = 0.0, var_hi = 0.0;
    for (int i = 0; i < 5; ++i) {
        const auto mom = model.moments(x_star + (i - 2) * h);
        mu[i] = mom.mu;
        if (i == 1) var_lo = mom.var;
        if (i == 3) var_hi = mom.var;
    }
    const double df = model.df_horizon();
    // m(x) = df*(E[R] - mu(x)); constants drop out of every difference
    const double mp_lo = df * (mu[0] - mu[2]) / (2.0 * h);   // m'(x*-h)
    const double mp_hi = df * (mu[2] - mu[4]) / (2.0 * h);   // m'(x*+h)
    const double mp_mid = df * (mu[1] - mu[3]) / (2.0 * h);  // m'(x*)
    if (std::fabs(mp_mid) < 1e-12)
        throw std::domain_error("ga_mtm_approx: conditional mean loss is flat at x*");
    const double g_lo = normal_pdf(x_star - h) * var_lo / mp_lo;
    const double g_hi = normal_pdf(x_star + h) * var_hi / mp_hi;
    GaEval out;
    out.m_prime = mp_mid;
    out.ga = -(g_hi - g_lo) / (2.0 * h) / (2.0 * normal_pdf(x_star));
    return out;
}
}  // namespace

MtmGaReport ga_mtm_approx(const MtmModel& model, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("ga_mtm_approx: q not in (0,1)");
    MtmGaReport rep;
    rep.x_star = normal_quantile(1.0 - q);
    rep.expected_return = model.expected_return();
    const double h = 1e-3;
    const auto coarse = ga_second_order(model, rep.x_star, h);
    const auto fine = ga_second_order(model, rep.x_star, 0.5 * h);
    rep.ga = coarse.ga;
    rep.m_prime = coarse.m_prime;
    rep.richardson_rel =
        std::fabs(coarse.ga - fine.ga) / std::max(std::fabs(fine.ga), 1e-12);
    return rep;
}

MtmGaReport ga_mtm_approx(const Portfolio& p, const TransitionMatrix& tm,
                          const NssParams& curve, const RiskParams& params,
                          StateSpace space) {
    return ga_mtm_approx(MtmModel::build(p, tm, curve, params, space), params.q);
}

}  // namespace concrisk
