#pragma once

#include <cstdint>
#include <stdexcept>

namespace concrisk {

enum class RhoMode { Irb, Fixed };

// Correlation used inside the risk-neutral PD transform. The paper applies a
// single rho there without saying which; Follow reuses the run's correlation
// mode, the other values pin it independently of the factor loading.
enum class RnRhoMode { Follow, Irb, Fixed };

// Risk-model knobs shared by the analytic and simulation paths. Defaults are
// the baseline configuration; the run config in the CLI layer overrides them.
struct RiskParams {
    double q = 0.999;        // VaR confidence level
    double elgd = 0.45;      // portfolio-level expected LGD, per-loan override wins
    double nu = 0.0;         // LGD volatility multiplier, VLGD^2 = nu*ELGD*(1-ELGD)
    double xi = 0.25;        // gamma factor precision (mean 1, variance 1/xi)
    double psi = 0.4;        // market price of risk in the risk-neutral PD map
    RhoMode rho_mode = RhoMode::Irb;
    double rho_fixed = 0.35;
    RnRhoMode rn_rho_mode = RnRhoMode::Follow;
    double rn_rho_fixed = 0.35;
    bool ma_clamp = true;    // clamp maturity to [1,5] inside the adjustment
    double horizon = 1.0;    // risk horizon in years
    double accrual = 0.5;    // coupon accrual period in years
    std::uint64_t scenarios = 4'000'000;
    std::uint64_t seed = 0;
    int threads = 0;         // simulation workers, 0 = hardware concurrency
    bool antithetic = false; // pair scenarios with mirrored uniforms; leaves
                             // the order-statistic std_error only approximate

    void validate() const {
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must be in (0,1)");
        if (!(elgd >= 0.0 && elgd <= 1.0))
            throw std::invalid_argument("elgd must be in [0,1]");
        if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must be in [0,1]");
        if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
        if (rho_mode == RhoMode::Fixed && !(rho_fixed > 0.0 && rho_fixed < 1.0))
            throw std::invalid_argument("fixed rho must be in (0,1)");
        if (rn_rho_mode == RnRhoMode::Fixed &&
            !(rn_rho_fixed > 0.0 && rn_rho_fixed < 1.0))
            throw std::invalid_argument("fixed risk-neutral rho must be in (0,1)");
        if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
        if (!(accrual > 0.0)) throw std::invalid_argument("accrual must be positive");
        if (scenarios < 10'000)
            throw std::invalid_argument("scenario count must be at least 10,000");
        if (threads < 0) throw std::invalid_argument("threads must be >= 0");
    }
};

}  // namespace concrisk
