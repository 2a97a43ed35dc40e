#pragma once

#include "concrisk/ratings.hpp"

#include <optional>
#include <string>
#include <vector>

namespace concrisk {

struct LoanPosition {
    std::string borrower_id;
    double exposure = 0.0;
    int grade = 0;                 // state index on the run's rating scale
    std::string rating;            // symbol as read
    double maturity = 1.0;         // years
    double coupon = 0.01;          // annual rate
    std::optional<double> elgd;    // per-borrower override
};

class Portfolio {
  public:
    explicit Portfolio(std::vector<LoanPosition> positions);

    const std::vector<LoanPosition>& positions() const { return positions_; }
    std::size_t size() const { return positions_.size(); }
    double total_exposure() const { return total_; }
    const std::vector<double>& shares() const { return shares_; }

    double weighted_pd(const TransitionMatrix& tm) const;
    double weighted_maturity() const;

  private:
    std::vector<LoanPosition> positions_;
    std::vector<double> shares_;
    double total_ = 0.0;
};

struct PortfolioDefaults {
    double coupon = 0.01;
    double maturity = 1.0;
};

Portfolio load_portfolio(const std::string& path, const RatingScale& scale,
                         const PortfolioDefaults& defaults = {});

std::string serialize_portfolio(const Portfolio& p);

}  // namespace concrisk
