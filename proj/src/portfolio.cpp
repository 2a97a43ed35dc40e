#include "concrisk/portfolio.hpp"

#include "concrisk/csv.hpp"
#include "concrisk/mathx.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

namespace concrisk {

Portfolio::Portfolio(std::vector<LoanPosition> positions)
    : positions_(std::move(positions)) {
    if (positions_.empty())
        throw std::invalid_argument("portfolio is empty");
    std::set<std::string> ids;
    for (const auto& p : positions_) {
        if (!(p.exposure > 0.0))
            throw std::invalid_argument("borrower '" + p.borrower_id +
                                        "' has non-positive exposure");
        if (!(p.maturity > 0.0))
            throw std::invalid_argument("borrower '" + p.borrower_id +
                                        "' has non-positive maturity");
        if (p.coupon < 0.0)
            throw std::invalid_argument("borrower '" + p.borrower_id +
                                        "' has negative coupon");
        if (p.elgd && (*p.elgd < 0.0 || *p.elgd > 1.0))
            throw std::invalid_argument("borrower '" + p.borrower_id +
                                        "' has elgd outside [0,1]");
        if (!ids.insert(p.borrower_id).second)
            throw std::invalid_argument("duplicate borrower_id '" + p.borrower_id + "'");
        total_ += p.exposure;
    }
    shares_.reserve(positions_.size());
    for (const auto& p : positions_) shares_.push_back(p.exposure / total_);
}

double Portfolio::weighted_pd(const TransitionMatrix& tm) const {
    KahanSum s;
    for (std::size_t i = 0; i < positions_.size(); ++i)
        s.add(shares_[i] * tm.default_prob(positions_[i].grade));
    return s.value();
}

double Portfolio::weighted_maturity() const {
    KahanSum s;
    for (std::size_t i = 0; i < positions_.size(); ++i)
        s.add(shares_[i] * positions_[i].maturity);
    return s.value();
}

Portfolio load_portfolio(const std::string& path, const RatingScale& scale,
                         const PortfolioDefaults& defaults) {
    const CsvTable t = read_csv(path);
    const int c_id = t.require_column("borrower_id");
    const int c_exp = t.require_column("exposure");
    const int c_rat = t.require_column("rating");
    const int c_mat = t.column("maturity_years");
    const int c_cpn = t.column("coupon_rate");
    const int c_lgd = t.column("elgd");

    std::vector<LoanPosition> positions;
    positions.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        LoanPosition p;
        p.borrower_id = row[c_id];
        if (p.borrower_id.empty())
            throw std::invalid_argument(path + ": empty borrower_id");
        p.exposure = parse_double(row[c_exp], path + " borrower " + p.borrower_id);
        p.rating = row[c_rat];
        p.grade = scale.index(p.rating);
        if (p.grade == RatingScale::kDefault)
            throw std::invalid_argument(path + ": borrower '" + p.borrower_id +
                                        "' is already in default");
        p.maturity = (c_mat >= 0 && !row[c_mat].empty())
                         ? parse_double(row[c_mat], path + " maturity of " + p.borrower_id)
                         : defaults.maturity;
        p.coupon = (c_cpn >= 0 && !row[c_cpn].empty())
                       ? parse_double(row[c_cpn], path + " coupon of " + p.borrower_id)
                       : defaults.coupon;
        if (c_lgd >= 0 && !row[c_lgd].empty())
            p.elgd = parse_double(row[c_lgd], path + " elgd of " + p.borrower_id);
        positions.push_back(std::move(p));
    }
    try {
        return Portfolio(std::move(positions));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

std::string serialize_portfolio(const Portfolio& p) {
    std::string out = "borrower_id,exposure,rating,maturity_years,coupon_rate,elgd\n";
    char buf[256];
    for (const auto& pos : p.positions()) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%s,%.17g,%.17g,", pos.borrower_id.c_str(),
                      pos.exposure, pos.rating.c_str(), pos.maturity, pos.coupon);
        out += buf;
        if (pos.elgd) {
            std::snprintf(buf, sizeof buf, "%.17g", *pos.elgd);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace concrisk
