#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "concrisk/portfolio.hpp"
#include "concrisk/ratings.hpp"
#include "concrisk/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace concrisk;

namespace {

const TransitionMatrix& matrix() {
    static TransitionMatrix tm =
        load_transition_matrix(std::string(FIXTURES_DIR) + "/transition_matrix.csv");
    return tm;
}

std::string fixture_path(const SyntheticPortfolioSpec& spec) {
    std::string base = spec.name;
    std::transform(base.begin(), base.end(), base.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return std::string(FIXTURES_DIR) + "/portfolio_" + base + ".csv";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing ", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int top_count(int n, double f) { return int(std::max(1L, std::lround(f * n))); }

}  // namespace

TEST_CASE("generated books hit the summary-table statistics") {
    const auto& tm = matrix();
    for (const auto& spec : mdb_portfolio_specs()) {
        CAPTURE(spec.name);
        const Portfolio p = generate_synthetic(spec, tm);

        CHECK(int(p.size()) == spec.n_borrowers);
        CHECK(p.total_exposure() == doctest::Approx(spec.total_exposure).epsilon(1e-9));

        const double wpd = p.weighted_pd(tm);
        CHECK(std::abs(wpd - spec.target_avg_pd) <= 0.05 * spec.target_avg_pd);

        if (spec.avg_maturity > 1.0) {
            const double wm = p.weighted_maturity();
            CHECK(std::abs(wm - spec.avg_maturity) <= 1e-9 * spec.avg_maturity);
        } else {
            for (const auto& pos : p.positions()) CHECK(pos.maturity == 1.0);
        }

        std::set<std::string> ids;
        for (const auto& pos : p.positions()) {
            CHECK(pos.grade != RatingScale::kDefault);
            CHECK(pos.maturity >= 1.0);
            CHECK(pos.coupon == 0.01);
            CHECK(!pos.elgd.has_value());
            ids.insert(pos.borrower_id);
        }
        CHECK(ids.size() == p.size());
    }
}

TEST_CASE("exposure profiles concentrate like the published books") {
    const auto& tm = matrix();
    for (const auto& spec : mdb_portfolio_specs()) {
        CAPTURE(spec.name);
        const Portfolio p = generate_synthetic(spec, tm);
        const int n = spec.n_borrowers;
        const int k1 = top_count(n, 0.10);
        const int k2 = top_count(n, 0.20);
        if (k1 < n) {
            const double t10 = top_fraction_share(p, 0.10);
            CHECK(t10 >= spec.top10_share - 0.05);
            CHECK(t10 <= spec.top10_share + 0.05);
        }
        if (k2 > k1 && k2 < n) {
            const double t20 = top_fraction_share(p, 0.20);
            CHECK(t20 >= spec.top20_share - 0.05);
            CHECK(t20 <= spec.top20_share + 0.05);
        }
        // the profile is emitted largest first
        const auto& pos = p.positions();
        for (std::size_t i = 1; i < pos.size(); ++i)
            CHECK(pos[i - 1].exposure >= pos[i].exposure);
    }
}

TEST_CASE("regeneration is deterministic and seed-sensitive") {
    const auto& tm = matrix();
    SyntheticPortfolioSpec spec = mdb_portfolio_specs().front();
    const std::string a = synthetic_fixture_csv(generate_synthetic(spec, tm), spec);
    const std::string b = synthetic_fixture_csv(generate_synthetic(spec, tm), spec);
    CHECK(a == b);
    spec.seed += 1;
    const std::string c = synthetic_fixture_csv(generate_synthetic(spec, tm), spec);
    CHECK(a != c);
}

TEST_CASE("committed fixture files match regeneration byte for byte") {
    const auto& tm = matrix();
    for (const auto& spec : mdb_portfolio_specs()) {
        CAPTURE(spec.name);
        const std::string expected = synthetic_fixture_csv(generate_synthetic(spec, tm), spec);
        CHECK(read_file(fixture_path(spec)) == expected);
    }
}

TEST_CASE("fixture files load back faithfully") {
    const auto& tm = matrix();
    for (const auto& spec : mdb_portfolio_specs()) {
        CAPTURE(spec.name);
        const Portfolio gen = generate_synthetic(spec, tm);
        const Portfolio loaded = load_portfolio(fixture_path(spec), tm.scale());
        REQUIRE(loaded.size() == gen.size());
        for (std::size_t i = 0; i < gen.size(); ++i) {
            const auto& a = gen.positions()[i];
            const auto& b = loaded.positions()[i];
            CHECK(a.borrower_id == b.borrower_id);
            CHECK(a.exposure == b.exposure);  // %.17g round-trips doubles exactly
            CHECK(a.grade == b.grade);
            CHECK(a.maturity == b.maturity);
            CHECK(a.coupon == b.coupon);
        }
    }
}

TEST_CASE("single borrower takes the grade nearest the target") {
    const auto& tm = matrix();
    SyntheticPortfolioSpec spec{"ONE", 1, 100.0, 0.0238, 2.82, 42};
    const Portfolio p = generate_synthetic(spec, tm);
    REQUIRE(p.size() == 1);
    CHECK(p.positions()[0].rating == "B");
    CHECK(p.positions()[0].exposure == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(p.weighted_maturity() == doctest::Approx(2.82).epsilon(1e-12));

    spec.target_avg_pd = 0.5147;
    spec.avg_maturity = 1.0;
    const Portfolio worst = generate_synthetic(spec, tm);
    CHECK(worst.positions()[0].rating == "Cs");
    CHECK(worst.positions()[0].maturity == 1.0);
}

TEST_CASE("a target between grade PDs mixes the bracketing grades") {
    const auto& tm = matrix();
    // 5bp sits between BBB+ (4bp) and BBB (6bp)
    SyntheticPortfolioSpec spec{"MIX", 40, 1000.0, 0.0005, 3.0, 77};
    const Portfolio p = generate_synthetic(spec, tm);
    const int bbb_plus = tm.scale().index("BBB+");
    const int bbb = tm.scale().index("BBB");
    bool has_lo = false, has_hi = false;
    for (const auto& pos : p.positions()) {
        CHECK((pos.grade == bbb_plus || pos.grade == bbb));
        has_lo |= pos.grade == bbb_plus;
        has_hi |= pos.grade == bbb;
    }
    CHECK(has_lo);
    CHECK(has_hi);
    CHECK(std::abs(p.weighted_pd(tm) - spec.target_avg_pd) <= 0.05 * spec.target_avg_pd);
}

TEST_CASE("maturity floor binds without moving the mean") {
    const auto& tm = matrix();
    const auto specs = mdb_portfolio_specs();
    const auto tdb = std::find_if(specs.begin(), specs.end(),
                                  [](const auto& s) { return s.name == "TDB"; });
    REQUIRE(tdb != specs.end());
    const Portfolio p = generate_synthetic(*tdb, tm);
    double lo = 1e9;
    for (const auto& pos : p.positions()) lo = std::min(lo, pos.maturity);
    CHECK(lo >= 1.0);
    CHECK(p.weighted_maturity() == doctest::Approx(1.64).epsilon(1e-9));

    const auto cdb = std::find_if(specs.begin(), specs.end(),
                                  [](const auto& s) { return s.name == "CDB"; });
    const Portfolio flat = generate_synthetic(*cdb, tm);
    for (const auto& pos : flat.positions()) CHECK(pos.maturity == 1.0);
}

TEST_CASE("infeasible specs are rejected") {
    const auto& tm = matrix();
    SyntheticPortfolioSpec spec{"BAD", 10, 100.0, 0.0146, 3.0, 1};

    auto bad = spec;
    bad.target_avg_pd = 0.90;  // above the worst grade
    CHECK_THROWS_AS(generate_synthetic(bad, tm), std::invalid_argument);
    bad.target_avg_pd = 1.2;
    CHECK_THROWS_AS(generate_synthetic(bad, tm), std::invalid_argument);
    bad.target_avg_pd = -0.01;
    CHECK_THROWS_AS(generate_synthetic(bad, tm), std::invalid_argument);

    bad = spec;
    bad.avg_maturity = 0.5;
    CHECK_THROWS_AS(generate_synthetic(bad, tm), std::invalid_argument);
    bad = spec;
    bad.n_borrowers = 0;
    CHECK_THROWS_AS(generate_synthetic(bad, tm), std::invalid_argument);
    bad = spec;
    bad.total_exposure = 0.0;
    CHECK_THROWS_AS(generate_synthetic(bad, tm), std::invalid_argument);
    bad = spec;
    bad.top10_share = 0.80;
    bad.top20_share = 0.50;
    CHECK_THROWS_AS(generate_synthetic(bad, tm), std::invalid_argument);
}

TEST_CASE("pct variant lifts every grade by two notches") {
    const auto& tm = matrix();
    const TransitionMatrix pct =
        load_transition_matrix(std::string(FIXTURES_DIR) + "/transition_matrix_pct.csv");
    REQUIRE(pct.states() == tm.states());
    for (int g = 1; g < tm.states(); ++g) {
        CAPTURE(tm.scale().symbol(g));
        CHECK(pct.scale().symbol(g) == tm.scale().symbol(g));
        const int src = std::min(g + 2, tm.states() - 1);
        CHECK(pct.default_prob(g) == doctest::Approx(tm.default_prob(src)).epsilon(1e-6));
        CHECK(pct.default_prob(g) <= tm.default_prob(g) + 1e-12);
    }
    // the Cs row becomes the B row: the dominant fixture PD drops to 2.38%
    CHECK(pct.default_prob(pct.scale().index("Cs")) == doctest::Approx(0.0238).epsilon(1e-3));
    ThresholdTable cuts(pct);  // cutoffs stay monotone, construction validates
    CHECK(cuts.states() == pct.states());
}

TEST_CASE("pct uplift helper honours the notch count") {
    const auto& tm = matrix();
    const TransitionMatrix same = pct_uplift(tm, 0);
    CHECK(same.data() == tm.data());
    CHECK_THROWS_AS(pct_uplift(tm, -1), std::invalid_argument);

    const TransitionMatrix one = pct_uplift(tm, 1);
    const int b_plus = tm.scale().index("B+");
    CHECK(one.default_prob(b_plus) == tm.default_prob(b_plus + 1));
}
