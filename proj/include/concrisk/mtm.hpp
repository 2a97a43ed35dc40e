#pragma once

#include "concrisk/portfolio.hpp"
#include "concrisk/ratings.hpp"
#include "concrisk/riskparams.hpp"
#include "concrisk/yieldcurve.hpp"

#include <vector>

namespace concrisk {

// Face-1 coupon bond. Payment dates run backward from maturity in accrual
// steps, so the first period may be shorter than the rest.
struct BondSpec {
    double coupon = 0.01;
    double accrual = 0.5;
    double maturity = 1.0;  // tau, years from today
    double horizon = 1.0;   // T, valuation horizon
};

// Ascending payment dates in (0, maturity], last one exactly at maturity.
std::vector<double> payment_schedule(double maturity, double accrual);

// Risk-neutral survival to u years ahead for a borrower currently in `grade`:
// 1 - KMV-transformed cumulative PD. u = 0 returns 1.
double rn_survival(const CumulativePdTable& pds, int grade, double u, double rho,
                   double psi);

// Expected discounted cashflows today: coupons and principal weighted by
// risk-neutral survival, plus (1-elgd) recovery paid at the end of the
// payment period in which default occurs.
double price_bond_t0(const BondSpec& spec, int grade, const NssParams& curve,
                     const CumulativePdTable& pds, double elgd, double psi, double rho);

// Value at the horizon for a survivor in `grade_at_T`: coupons paid up to the
// horizon carried forward at the risk-free curve, remaining cashflows priced
// off the survivor grade's term structure. A bond maturing exactly at the
// horizon is worth principal plus carried coupons. The defaulted-state value
// is the constant (1-elgd) and is not priced here.
double price_bond_tT(const BondSpec& spec, int grade_at_T, const NssParams& curve,
                     const CumulativePdTable& pds, double elgd, double psi, double rho);

struct StatePriceTable {
    double p0 = 0.0;
    std::vector<double> pT;  // index = state; [0] is the default state
};

// Conditional state probabilities given factor value x for a borrower in
// `grade`: differences of normal CDFs at the threshold cutoffs. Sums to 1.
std::vector<double> state_probabilities(const ThresholdTable& thr, int grade,
                                        double rho, double x);

// Collapsed two-state version: {default, survive} at horizon default
// probability pd.
void state_probabilities_two(double pd, double rho, double x, double out[2]);

enum class StateSpace { Ratings, DefaultOnly };

struct ConditionalMoments {
    std::vector<double> mu_n;  // conditional expected return per borrower
    double mu = 0.0;           // share-weighted total
    double var = 0.0;          // conditional variance of the discounted loss rate
};

// Everything the moment and simulation paths need, computed once per run.
class MtmModel {
  public:
    static MtmModel build(const Portfolio& p, const TransitionMatrix& tm,
                          const NssParams& curve, const RiskParams& params,
                          StateSpace space);

    StateSpace space() const { return space_; }
    double df_horizon() const { return df_T_; }           // e^{-rT}
    double expected_return() const { return expected_return_; }
    std::size_t borrowers() const { return ratios_.size(); }
    int states(std::size_t n) const { return int(ratios_[n].size()); }
    double rho(std::size_t n) const { return rho_[n]; }
    // P_nT(s)/P_n0 return ratios
    const std::vector<double>& return_ratios(std::size_t n) const { return ratios_[n]; }
    const StatePriceTable& prices(std::size_t n) const { return prices_[n]; }
    // beta parameters for the random-LGD default state, {0,0} when nu = 0
    double lgd_beta_a(std::size_t n) const { return beta_a_[n]; }
    double lgd_beta_b(std::size_t n) const { return beta_b_[n]; }
    double elgd(std::size_t n) const { return elgd_[n]; }
    double share(std::size_t n) const { return shares_[n]; }
    double lgd_dispersion() const { return nu_; }

    // latent-return state bucket for borrower n
    int bucket(std::size_t n, double y) const;

    double mu_single(std::size_t n, double x) const;
    ConditionalMoments moments(double x) const;

  private:
    StateSpace space_ = StateSpace::Ratings;
    std::vector<StatePriceTable> prices_;
    std::vector<std::vector<double>> ratios_;
    std::vector<double> rho_;
    std::vector<double> elgd_;
    std::vector<double> beta_a_, beta_b_;
    std::vector<double> lgd_var_term_;  // VLGD^2 / P_n0^2, 0 when nu = 0
    std::vector<double> cutoff_;        // DefaultOnly: Phi^-1(pd_T) per borrower
    std::vector<double> shares_;
    std::vector<int> grade_;
    ThresholdTable thresholds_;  // Ratings space, built from the T-step matrix
    double df_T_ = 1.0;
    double expected_return_ = 0.0;
    double nu_ = 0.0;

    explicit MtmModel(ThresholdTable thr) : thresholds_(std::move(thr)) {}
};

struct MtmGaReport {
    double ga = 0.0;              // fraction of EAD
    double m_prime = 0.0;         // slope of conditional mean loss at x*
    double richardson_rel = 0.0;  // relative gap between the h and h/2 estimates
    double expected_return = 0.0;
    double x_star = 0.0;
};

// Second-order granularity adjustment
//   -(1 / 2 phi(x*)) d/dx [ phi(x) v(x) / m'(x) ] at x* = Phi^-1(1-q),
// m(x) = e^{-rT}(E[R] - mu(x)), v(x) the conditional loss variance,
// derivatives by central differences (step 1e-3, halved for verification).
MtmGaReport ga_mtm_approx(const MtmModel& model, double q);

// Convenience: build the model, then evaluate.
MtmGaReport ga_mtm_approx(const Portfolio& p, const TransitionMatrix& tm,
                          const NssParams& curve, const RiskParams& params,
                          StateSpace space);

}  // namespace concrisk
