#pragma once

#include "concrisk/portfolio.hpp"
#include "concrisk/ratings.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace concrisk {

// Recipe for a synthetic book shaped like one row of the published summary
// table: a Pareto-like exposure profile (the largest tenth of names carries
// about half the book, the largest fifth rather more than three quarters),
// grades chosen to hit an exposure-weighted average PD, and maturities drawn
// around the average then rescaled onto it exactly.
struct SyntheticPortfolioSpec {
    std::string name;
    int n_borrowers = 0;
    double total_exposure = 0.0;  // millions, only sets the scale
    double target_avg_pd = 0.0;   // exposure weighted, fraction
    double avg_maturity = 1.0;    // exposure weighted, years; never below 1
    std::uint64_t seed = 0;
    double top10_share = 0.50;    // mass of the largest max(1, round(N/10)) names
    double top20_share = 0.78;    // mass of the largest max(1, round(N/5)) names
};

// Deterministic in the seed. Throws std::invalid_argument when the target
// average PD lies outside the grade PDs of the scale or the average maturity
// is below the one-year horizon.
Portfolio generate_synthetic(const SyntheticPortfolioSpec& spec, const TransitionMatrix& tm);

// Exposure mass held by the largest max(1, round(f*N)) borrowers.
double top_fraction_share(const Portfolio& p, double f);

// The eleven book shapes from the summary table, with frozen seeds.
std::vector<SyntheticPortfolioSpec> mdb_portfolio_specs();

// Fixture file content: a labelled comment header plus the canonical
// portfolio CSV. Byte-stable: regeneration from the stored seed reproduces
// the committed file exactly.
std::string synthetic_fixture_csv(const Portfolio& p, const SyntheticPortfolioSpec& spec);

// Preferred-creditor stand-in: each grade adopts the transition row of the
// grade `notches` better, capped at the best grade. Synthetic, not published
// data; the real adjusted matrix can be supplied as an input file instead.
TransitionMatrix pct_uplift(const TransitionMatrix& tm, int notches = 2);

// Published-table layout: columns best to worst then D, percent entries.
std::string transition_matrix_csv(const TransitionMatrix& tm);

}  // namespace concrisk
