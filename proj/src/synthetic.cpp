#include "concrisk/synthetic.hpp"

#include "concrisk/mathx.hpp"
#include "concrisk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace concrisk {

namespace {

// Largest-f fraction expressed as a name count.
int top_count(int n, double f) {
    return int(std::max(1L, std::lround(f * n)));
}

// Per-block weights: a linear taper plus jitter, both confined to a
// [1-spread, 1+spread] band around the block average. One uniform draw per
// name, whatever the block layout.
void fill_block(std::vector<double>& shares, ScenarioStream& rng, int count, double mass,
                double spread) {
    if (count <= 0) return;
    std::vector<double> w(count);
    double sum = 0.0;
    for (int i = 0; i < count; ++i) {
        const double t = (count == 1) ? 0.0 : 1.0 - 2.0 * double(i) / double(count - 1);
        const double j = 2.0 * rng.uniform() - 1.0;
        w[i] = 1.0 + spread * (0.7 * t + 0.3 * j);
        sum += w[i];
    }
    for (int i = 0; i < count; ++i) shares.push_back(mass * w[i] / sum);
}

struct GradePd {
    double pd;
    int grade;
};

}  // namespace

Portfolio generate_synthetic(const SyntheticPortfolioSpec& spec, const TransitionMatrix& tm) {
    const int n = spec.n_borrowers;
    if (n < 1) throw std::invalid_argument("spec '" + spec.name + "': n_borrowers < 1");
    if (!(spec.total_exposure > 0.0))
        throw std::invalid_argument("spec '" + spec.name + "': total_exposure <= 0");
    if (!(spec.target_avg_pd >= 0.0) || spec.target_avg_pd >= 1.0)
        throw std::invalid_argument("spec '" + spec.name + "': target_avg_pd outside [0,1)");
    if (!(spec.top10_share > 0.0) || spec.top10_share > spec.top20_share ||
        spec.top20_share >= 1.0)
        throw std::invalid_argument("spec '" + spec.name + "': concentration shares invalid");
    if (spec.avg_maturity < 1.0 - 1e-12)
        throw std::invalid_argument("spec '" + spec.name +
                                    "': average maturity below the one-year horizon");

    std::vector<GradePd> grades;
    for (int g = 1; g < tm.states(); ++g) grades.push_back({tm.default_prob(g), g});
    std::sort(grades.begin(), grades.end(), [](const GradePd& a, const GradePd& b) {
        return a.pd < b.pd || (a.pd == b.pd && a.grade < b.grade);
    });
    if (spec.target_avg_pd < grades.front().pd - 1e-15 ||
        spec.target_avg_pd > grades.back().pd + 1e-15)
        throw std::invalid_argument(
            "spec '" + spec.name + "': target average PD " +
            std::to_string(spec.target_avg_pd) + " is outside the grade range [" +
            std::to_string(grades.front().pd) + ", " + std::to_string(grades.back().pd) + "]");

    ScenarioStream rng(spec.seed, 0);

    // Exposure shares in three blocks: the top decile of names, the next, the
    // tail. Rounding can collapse a block for small N. Name counts quantize
    // the Lorenz knots, so the second block's mass is capped where the ideal
    // 50/78 split would put a block-two name above a block-one name (N=16:
    // two names at 25% each cannot be followed by one at 28%); the cap keeps
    // shares descending and stays inside the +-5pp acceptance band.
    const int n1 = std::min(top_count(n, 0.10), n);
    const int k2 = std::min(std::max(top_count(n, 0.20), n1), n);
    const int n2 = k2 - n1;
    const int n3 = n - n1 - n2;
    double m1 = spec.top10_share;
    double m2 = 0.0;
    if (n2 > 0)
        m2 = std::min(spec.top20_share - m1, 0.98 * m1 * double(n2) / double(n1));
    if (n3 == 0 && n2 == 0) m1 = 1.0;
    if (n3 == 0 && n2 > 0) m2 = 1.0 - m1;
    double m3 = (n3 > 0) ? 1.0 - m1 - m2 : 0.0;
    if (n3 > 0) {
        if (n2 > 0 && m3 / n3 > 0.999 * m2 / n2) {
            m2 = double(n2) * (1.0 - m1) / double(n2 + n3);  // equalize blocks two and three
            m3 = 1.0 - m1 - m2;
        } else if (n2 == 0 && m3 / n3 > m1 / n1) {
            m1 = double(n1) / double(n1 + n3);  // flat profile is the only descending one
            m3 = 1.0 - m1;
        }
    }

    // Spread per block, limited by the gap to the neighbouring block averages
    // so the bands cannot overlap and the sorted order respects block masses.
    struct Blk {
        int count;
        double mass;
        double spread = 0.35;
    };
    std::vector<Blk> blocks;
    if (n1 > 0) blocks.push_back({n1, m1});
    if (n2 > 0) blocks.push_back({n2, m2});
    if (n3 > 0) blocks.push_back({n3, m3});
    for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
        const double a_avg = blocks[b].mass / blocks[b].count;
        const double b_avg = blocks[b + 1].mass / blocks[b + 1].count;
        const double pair = std::max(0.0, (a_avg - b_avg) / (a_avg + b_avg));
        blocks[b].spread = std::min(blocks[b].spread, 0.75 * pair);
        blocks[b + 1].spread = std::min(blocks[b + 1].spread, 0.75 * pair);
    }

    std::vector<double> shares;
    shares.reserve(n);
    for (const auto& blk : blocks) fill_block(shares, rng, blk.count, blk.mass, blk.spread);
    std::sort(shares.begin(), shares.end(), std::greater<>());

    // Grade assignment. When a grade matches the target PD it is used for the
    // whole book with a sprinkle of one-notch moves on tail names for texture;
    // otherwise the two bracketing grades are mixed by exposure mass.
    const double target = spec.target_avg_pd;
    std::vector<int> grade(n);
    const GradePd* nearest = &grades.front();
    for (const auto& g : grades)
        if (std::abs(g.pd - target) <= std::abs(nearest->pd - target)) nearest = &g;

    if (std::abs(nearest->pd - target) <= std::max(0.005 * target, 1e-15)) {
        const int base = nearest->grade;
        std::fill(grade.begin(), grade.end(), base);
        if (n >= 8) {
            const double budget = 0.04 * target;
            double drift = 0.0;
            for (int i = n1 + n2; i < n; ++i) {
                if (rng.uniform() >= 0.30) continue;
                const int cand = (rng.uniform() < 0.5) ? base + 1 : base - 1;
                if (cand < 1 || cand >= tm.states()) continue;
                const double step = shares[i] * (tm.default_prob(cand) - tm.default_prob(base));
                if (std::abs(drift + step) > budget) continue;
                grade[i] = cand;
                drift += step;
            }
        }
    } else {
        std::size_t lo = 0;
        while (lo + 1 < grades.size() && grades[lo + 1].pd <= target) ++lo;
        std::size_t hi = lo;
        while (hi < grades.size() && grades[hi].pd < target) ++hi;
        const double pd_lo = grades[lo].pd, pd_hi = grades[hi].pd;
        const double theta = (target - pd_lo) / (pd_hi - pd_lo);  // mass on the riskier grade
        std::fill(grade.begin(), grade.end(), grades[lo].grade);
        double cum = 0.0;
        int last = -1;
        for (int i = n - 1; i >= 0 && cum < theta; --i) {
            grade[i] = grades[hi].grade;
            cum += shares[i];
            last = i;
        }
        if (last >= 0 && std::abs(cum - shares[last] - theta) < std::abs(cum - theta))
            grade[last] = grades[lo].grade;  // overshot: flipping back lands closer
    }

    // Maturities: uniform draws on [0.5,1.5]x the average, floored at the
    // one-year horizon, then rescaled onto the exact exposure-weighted mean.
    // The floor and the rescale interact, hence the fixed point.
    std::vector<double> mat(n, 1.0);
    if (spec.avg_maturity > 1.0 + 1e-12) {
        const double avg = spec.avg_maturity;
        for (int i = 0; i < n; ++i)
            mat[i] = std::max(1.0, avg * (0.5 + rng.uniform()));
        double cur = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            cur = 0.0;
            for (int i = 0; i < n; ++i) cur += shares[i] * mat[i];
            if (std::abs(cur - avg) <= 1e-13 * avg) break;
            const double gamma = avg / cur;
            for (int i = 0; i < n; ++i) mat[i] = std::max(1.0, mat[i] * gamma);
        }
        if (std::abs(cur - avg) > 1e-9 * avg)
            throw std::runtime_error("spec '" + spec.name +
                                     "': maturity profile cannot reach the average");
    }

    const std::size_t width = std::max<std::size_t>(2, std::to_string(n).size());
    std::vector<LoanPosition> positions(n);
    for (int i = 0; i < n; ++i) {
        std::string num = std::to_string(i + 1);
        if (num.size() < width) num.insert(0, width - num.size(), '0');
        positions[i].borrower_id = spec.name + "-" + num;
        positions[i].exposure = shares[i] * spec.total_exposure;
        positions[i].grade = grade[i];
        positions[i].rating = tm.scale().symbol(grade[i]);
        positions[i].maturity = mat[i];
        positions[i].coupon = 0.01;
    }
    Portfolio p(std::move(positions));

    if (n1 < n && std::abs(top_fraction_share(p, 0.10) - spec.top10_share) > 0.05)
        throw std::runtime_error("spec '" + spec.name + "': top-10% share off target");
    if (k2 > n1 && k2 < n && std::abs(top_fraction_share(p, 0.20) - spec.top20_share) > 0.05)
        throw std::runtime_error("spec '" + spec.name + "': top-20% share off target");
    return p;
}

double top_fraction_share(const Portfolio& p, double f) {
    std::vector<double> s = p.shares();
    std::sort(s.begin(), s.end(), std::greater<>());
    const int k = std::min(top_count(int(s.size()), f), int(s.size()));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += s[i];
    return sum;
}

std::vector<SyntheticPortfolioSpec> mdb_portfolio_specs() {
    // N, total exposure, avg PD and avg maturity follow the summary table;
    // two books publish no maturity and sit at the one-year horizon.
    std::vector<SyntheticPortfolioSpec> specs{
        {"CAF", 16, 28574.0, 0.0146, 5.09, 9001},
        {"ADB", 38, 145036.0, 0.0018, 8.20, 9002},
        {"AFDB", 29, 28174.0, 0.0146, 5.62, 9003},
        {"IDB", 26, 108520.0, 0.0090, 8.48, 9004},
        {"CDB", 16, 1327.0, 0.0238, 1.0, 9005},
        {"CABEI", 11, 9255.0, 0.0146, 5.39, 9006},
        {"EADB", 4, 135.0, 0.0238, 2.82, 9007},
        {"EBRD", 38, 47272.0, 0.0090, 1.0, 9008},
        {"IBRD", 78, 229344.0, 0.0040, 7.08, 9009},
        {"TDB", 21, 6506.0, 0.5147, 1.64, 9010},
        {"BOAD", 8, 3868.0, 0.0238, 4.59, 9011},
    };
    return specs;
}

std::string synthetic_fixture_csv(const Portfolio& p, const SyntheticPortfolioSpec& spec) {
    std::string out = "# synthetic portfolio, " + spec.name + " shape (N=" +
                      std::to_string(spec.n_borrowers) + ", seed=" +
                      std::to_string(spec.seed) + ")\n";
    out += "# regenerate with gen_fixtures; do not edit by hand\n";
    out += serialize_portfolio(p);
    return out;
}

TransitionMatrix pct_uplift(const TransitionMatrix& tm, int notches) {
    if (notches < 0) throw std::invalid_argument("pct_uplift: negative notch count");
    const int s = tm.states();
    std::vector<double> probs(std::size_t(s) * s);
    for (int from = 0; from < s; ++from) {
        const int src = (from == RatingScale::kDefault) ? from : std::min(from + notches, s - 1);
        for (int to = 0; to < s; ++to) probs[std::size_t(from) * s + to] = tm.prob(src, to);
    }
    return TransitionMatrix(tm.scale(), std::move(probs));
}

std::string transition_matrix_csv(const TransitionMatrix& tm) {
    const RatingScale& scale = tm.scale();
    const int s = tm.states();
    std::vector<int> order;  // best to worst, D last
    for (int g = s - 1; g >= 1; --g) order.push_back(g);
    order.push_back(RatingScale::kDefault);

    std::string out = "from_grade";
    for (int to : order) out += "," + scale.symbol(to);
    out += '\n';
    char buf[32];
    for (int from : order) {
        out += scale.symbol(from);
        for (int to : order) {
            std::snprintf(buf, sizeof buf, ",%.6f", 100.0 * tm.prob(from, to));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace concrisk
