#include "concrisk/mc.hpp"

#include "concrisk/irb.hpp"
#include "concrisk/mathx.hpp"
#include "concrisk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <thread>
#include <vector>

namespace concrisk {

namespace {

constexpr double kZ975 = 1.959963984540054;

struct Bracket {
    std::uint64_t k, lo, hi;  // 1-based order-statistic indices
};

Bracket order_stat_bracket(std::uint64_t s, double q) {
    std::uint64_t k = std::uint64_t(std::ceil(q * double(s)));
    if (k < 1) k = 1;
    if (k > s) k = s;
    const double half = kZ975 * std::sqrt(double(s) * q * (1.0 - q));
    const double lo_f = double(k) - half;
    const double hi_f = double(k) + half;
    if (lo_f < 1.0 || hi_f > double(s))
        throw std::invalid_argument(
            "quantile bracket leaves the sample: q too extreme for this scenario count");
    return {k, std::uint64_t(std::floor(lo_f)), std::uint64_t(std::ceil(hi_f))};
}

// Sorts in place, reads the order statistic and its bracket.
McEstimate estimate_from_losses(std::vector<double>& losses, double q) {
    std::sort(losses.begin(), losses.end());
    const Bracket br = order_stat_bracket(losses.size(), q);
    McEstimate e;
    e.value = losses[br.k - 1];
    e.ci_lo = losses[br.lo - 1];
    e.ci_hi = losses[br.hi - 1];
    e.std_error = (e.ci_hi - e.ci_lo) / (2.0 * kZ975);
    e.scenarios_used = losses.size();
    return e;
}

// Scenario i always sees the substream keyed (seed, i) regardless of how
// scenarios are chunked over threads; with antithetic pairing, scenarios
// 2j and 2j+1 share substream j, the odd one with mirrored uniforms.
// The kernel is copied per thread so it may carry scratch buffers.
template <class Kernel>
void run_scenarios(std::vector<double>& losses, const RiskParams& params,
                   const Kernel& kernel) {
    const std::uint64_t s = losses.size();
    unsigned tc = params.threads > 0
                      ? unsigned(params.threads)
                      : std::max(1u, std::thread::hardware_concurrency());
    if (std::uint64_t(tc) > s) tc = unsigned(s);
    const bool anti = params.antithetic;
    const std::uint64_t seed = params.seed;
    auto work = [&losses, seed, anti](Kernel k, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            ScenarioStream stream(seed, anti ? i >> 1 : i, anti && (i & 1));
            losses[i] = k(stream);
        }
    };
    if (tc <= 1) {
        work(kernel, 0, s);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(tc);
    const std::uint64_t chunk = (s + tc - 1) / tc;
    for (unsigned t = 0; t < tc; ++t) {
        const std::uint64_t lo = std::uint64_t(t) * chunk;
        if (lo >= s) break;
        pool.emplace_back(work, kernel, lo, std::min(s, lo + chunk));
    }
    for (auto& th : pool) th.join();
}

struct ActuarialName {
    double sq_rho, sq_1mrho, cut;
    double weight;  // share * elgd, loss when lgd is deterministic
    double share, beta_a, beta_b;
    bool draw_lgd;  // nu > 0 and elgd strictly inside (0,1)
};

struct ActuarialKernel {
    std::vector<ActuarialName> names;
    bool any_draw = false;
    std::vector<std::uint32_t> hits;  // scratch, per-thread via copy

    double operator()(ScenarioStream& st) {
        const double x = st.normal();
        if (!any_draw) {
            double loss = 0.0;
            for (const auto& nm : names) {
                const double y = nm.sq_rho * x + nm.sq_1mrho * st.normal();
                if (y <= nm.cut) loss += nm.weight;
            }
            return loss;
        }
        hits.clear();
        for (std::uint32_t n = 0; n < names.size(); ++n) {
            const auto& nm = names[n];
            const double y = nm.sq_rho * x + nm.sq_1mrho * st.normal();
            if (y <= nm.cut) hits.push_back(n);
        }
        double loss = 0.0;
        for (const std::uint32_t n : hits) {
            const auto& nm = names[n];
            loss += nm.draw_lgd ? nm.share * st.beta(nm.beta_a, nm.beta_b) : nm.weight;
        }
        return loss;
    }
};

ActuarialKernel actuarial_kernel(const Portfolio& p, const TransitionMatrix& tm,
                                 const RiskParams& params) {
    ActuarialKernel k;
    k.names.reserve(p.size());
    for (std::size_t n = 0; n < p.size(); ++n) {
        const auto& pos = p.positions()[n];
        const double pd = clamp_pd(tm.default_prob(pos.grade));
        const double rho = params.rho_mode == RhoMode::Irb ? asset_correlation_irb(pd)
                                                           : params.rho_fixed;
        const double elgd = pos.elgd.value_or(params.elgd);
        ActuarialName nm;
        nm.sq_rho = std::sqrt(rho);
        nm.sq_1mrho = std::sqrt(1.0 - rho);
        nm.cut = normal_quantile(pd);
        nm.share = p.shares()[n];
        nm.weight = nm.share * elgd;
        nm.draw_lgd = params.nu > 0.0 && elgd > 0.0 && elgd < 1.0;
        if (nm.draw_lgd) {
            const double spread = 1.0 / params.nu - 1.0;
            nm.beta_a = elgd * spread;
            nm.beta_b = (1.0 - elgd) * spread;
            k.any_draw = true;
        } else {
            nm.beta_a = nm.beta_b = 0.0;
        }
        k.names.push_back(nm);
    }
    return k;
}

struct MtmName {
    double sq_rho, sq_1mrho;
    double share, inv_p0, beta_a, beta_b;
    bool draw_lgd;
};

struct MtmKernel {
    const MtmModel* model = nullptr;
    std::vector<MtmName> names;
    bool any_draw = false;
    std::vector<int> buckets;  // scratch, per-thread via copy

    // returns -R so the VaR of the loss direction is an ascending order stat
    double operator()(ScenarioStream& st) {
        const double x = st.normal();
        const std::size_t count = names.size();
        if (!any_draw) {
            double r = 0.0;
            for (std::size_t n = 0; n < count; ++n) {
                const auto& nm = names[n];
                const double y = nm.sq_rho * x + nm.sq_1mrho * st.normal();
                r += nm.share * model->return_ratios(n)[std::size_t(model->bucket(n, y))];
            }
            return -r;
        }
        buckets.resize(count);
        for (std::size_t n = 0; n < count; ++n) {
            const auto& nm = names[n];
            const double y = nm.sq_rho * x + nm.sq_1mrho * st.normal();
            buckets[n] = model->bucket(n, y);
        }
        double r = 0.0;
        for (std::size_t n = 0; n < count; ++n) {
            const auto& nm = names[n];
            if (buckets[n] == 0 && nm.draw_lgd)
                r += nm.share * (1.0 - st.beta(nm.beta_a, nm.beta_b)) * nm.inv_p0;
            else
                r += nm.share * model->return_ratios(n)[std::size_t(buckets[n])];
        }
        return -r;
    }
};

}  // namespace

double quantile_std_error(const std::vector<double>& sorted_losses, double q) {
    if (sorted_losses.size() < 10'000)
        throw std::invalid_argument("quantile_std_error needs at least 10,000 points");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("quantile_std_error: q must be in (0,1)");
    const Bracket br = order_stat_bracket(sorted_losses.size(), q);
    return (sorted_losses[br.hi - 1] - sorted_losses[br.lo - 1]) / (2.0 * kZ975);
}

McEstimate simulate_actuarial_var(const Portfolio& p, const TransitionMatrix& tm,
                                  const RiskParams& params) {
    params.validate();
    if (params.nu >= 1.0)
        throw std::invalid_argument("nu = 1 leaves the lgd distribution degenerate");
    const ActuarialKernel kernel = actuarial_kernel(p, tm, params);
    std::vector<double> losses(params.scenarios);
    run_scenarios(losses, params, kernel);
    return estimate_from_losses(losses, params.q);
}

McEstimate ga_mc_actuarial(const Portfolio& p, const TransitionMatrix& tm,
                           const RiskParams& params) {
    McEstimate e = simulate_actuarial_var(p, tm, params);
    const double el = asymptotic_el(p, tm, params);
    e.value -= el;
    e.ci_lo -= el;
    e.ci_hi -= el;
    return e;
}

McEstimate ga_mc_mtm(const MtmModel& model, const RiskParams& params) {
    params.validate();
    if (params.nu >= 1.0)
        throw std::invalid_argument("nu = 1 leaves the lgd distribution degenerate");
    MtmKernel kernel;
    kernel.model = &model;
    kernel.names.reserve(model.borrowers());
    for (std::size_t n = 0; n < model.borrowers(); ++n) {
        MtmName nm;
        const double rho = model.rho(n);
        nm.sq_rho = std::sqrt(rho);
        nm.sq_1mrho = std::sqrt(1.0 - rho);
        nm.share = model.share(n);
        nm.inv_p0 = 1.0 / model.prices(n).p0;
        nm.beta_a = model.lgd_beta_a(n);
        nm.beta_b = model.lgd_beta_b(n);
        nm.draw_lgd = nm.beta_a > 0.0 && nm.beta_b > 0.0;
        if (nm.draw_lgd) kernel.any_draw = true;
        kernel.names.push_back(nm);
    }
    std::vector<double> neg_returns(params.scenarios);
    run_scenarios(neg_returns, params, kernel);
    McEstimate e = estimate_from_losses(neg_returns, params.q);
    const double x_star = normal_quantile(1.0 - params.q);
    const double mu_term = model.moments(x_star).mu;
    const double df = model.df_horizon();
    e.value = df * (mu_term + e.value);
    e.ci_lo = df * (mu_term + e.ci_lo);
    e.ci_hi = df * (mu_term + e.ci_hi);
    e.std_error *= df;
    return e;
}

McEstimate ga_mc_mtm(const Portfolio& p, const TransitionMatrix& tm,
                     const NssParams& curve, const RiskParams& params,
                     StateSpace space) {
    return ga_mc_mtm(MtmModel::build(p, tm, curve, params, space), params);
}

}  // namespace concrisk
