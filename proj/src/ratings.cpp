#include "concrisk/ratings.hpp"

#include "concrisk/csv.hpp"
#include "concrisk/mathx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace concrisk {

namespace {

constexpr double kRowSumTol = 5e-4;    // published tables round to 2 decimals
constexpr double kCumClip = 1e-12;

std::vector<double> rescale_rows(std::vector<double> p, int n, const std::string& what) {
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = p[i * n + j];
            if (v < 0.0 || v > 1.0 + kRowSumTol)
                throw std::invalid_argument(what + ": entry out of [0,1] in row " +
                                            std::to_string(i));
            s += v;
        }
        if (std::abs(s - 1.0) > kRowSumTol)
            throw std::invalid_argument(what + ": row " + std::to_string(i) +
                                        " sums to " + std::to_string(s) +
                                        ", beyond the 0.05% tolerance");
        for (int j = 0; j < n; ++j) p[i * n + j] /= s;
    }
    return p;
}

}  // namespace

RatingScale::RatingScale(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.size() < 2)
        throw std::invalid_argument("rating scale needs the default state and one grade");
    if (symbols_[0] != "D")
        throw std::invalid_argument("rating scale must have 'D' at state 0");
    std::set<std::string> seen(symbols_.begin(), symbols_.end());
    if (seen.size() != symbols_.size())
        throw std::invalid_argument("rating scale has duplicate symbols");
}

RatingScale RatingScale::from_file_order(const std::vector<std::string>& best_to_worst_d) {
    if (best_to_worst_d.empty() || best_to_worst_d.back() != "D")
        throw std::invalid_argument("grade header must end with 'D'");
    std::vector<std::string> internal(best_to_worst_d.rbegin(), best_to_worst_d.rend());
    return RatingScale(std::move(internal));
}

int RatingScale::index(const std::string& symbol) const {
    for (int i = 0; i < states(); ++i)
        if (symbols_[i] == symbol) return i;
    throw std::invalid_argument("unknown rating symbol '" + symbol + "'");
}

TransitionMatrix::TransitionMatrix(RatingScale scale, std::vector<double> probs)
    : scale_(std::move(scale)), p_(std::move(probs)) {
    const int n = states();
    if (int(p_.size()) != n * n)
        throw std::invalid_argument("transition matrix size does not match scale");
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = p_[i * n + j];
            if (v < -1e-15 || v > 1.0 + 1e-12)
                throw std::invalid_argument("transition probability out of [0,1]");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw std::invalid_argument("transition row " + scale_.symbol(i) +
                                        " is not stochastic (sum " + std::to_string(s) + ")");
    }
    if (std::abs(p_[RatingScale::kDefault * n + RatingScale::kDefault] - 1.0) > 1e-12)
        throw std::invalid_argument("default row must be absorbing");
    // pin the absorbing row exactly
    for (int j = 0; j < n; ++j) p_[RatingScale::kDefault * n + j] = j == 0 ? 1.0 : 0.0;
}

namespace {

// shared CSV -> (file-order symbols, file-order probs as fractions). The
// header row may or may not carry a leading label cell for the row-grade
// column; data rows always do.
RawTransitionTable read_matrix_csv(const std::string& path) {
    const auto rows = read_csv_rows(path);
    if (rows.size() < 3)
        throw std::invalid_argument(path + ": matrix file too short");
    RawTransitionTable raw;
    const std::size_t data_width = rows[1].size();
    std::size_t first = 0;
    if (rows[0].size() == data_width)
        first = 1;  // header carries a label cell for the from_grade column
    else if (rows[0].size() != data_width - 1)
        throw std::invalid_argument(path + ": header width does not match rows");
    raw.symbols_file_order.assign(rows[0].begin() + first, rows[0].end());
    const std::size_t n = raw.symbols_file_order.size();
    if (rows.size() - 1 != n)
        throw std::invalid_argument(path + ": expected " + std::to_string(n) +
                                    " rows, got " + std::to_string(rows.size() - 1));
    raw.probs.assign(n * n, 0.0);
    std::vector<bool> seen(n, false);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != n + 1)
            throw std::invalid_argument(path + ": row width mismatch");
        const auto it = std::find(raw.symbols_file_order.begin(),
                                  raw.symbols_file_order.end(), row[0]);
        if (it == raw.symbols_file_order.end())
            throw std::invalid_argument(path + ": row grade '" + row[0] +
                                        "' not in header");
        const std::size_t i = it - raw.symbols_file_order.begin();
        if (seen[i])
            throw std::invalid_argument(path + ": duplicate row for '" + row[0] + "'");
        seen[i] = true;
        for (std::size_t j = 0; j < n; ++j)
            raw.probs[i * n + j] =
                parse_double(row[j + 1], path + " row " + row[0]) / 100.0;
    }
    return raw;
}

TransitionMatrix from_file_order(const RawTransitionTable& raw, const std::string& what) {
    auto scale = RatingScale::from_file_order(raw.symbols_file_order);
    const int n = scale.states();
    // reverse both axes: file index j maps to internal n-1-j
    std::vector<double> p(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p[(n - 1 - i) * n + (n - 1 - j)] = raw.probs[i * n + j];
    p = rescale_rows(std::move(p), n, what);
    return TransitionMatrix(std::move(scale), std::move(p));
}

}  // namespace

TransitionMatrix load_transition_matrix(const std::string& path) {
    return from_file_order(read_matrix_csv(path), path);
}

RawTransitionTable load_raw_transition_table(const std::string& path) {
    return read_matrix_csv(path);
}

TransitionMatrix normalize_and_merge(const RawTransitionTable& raw,
                                     const std::string& merge_from) {
    const std::size_t n = raw.symbols_file_order.size();
    const auto& syms = raw.symbols_file_order;
    const auto nr_it = std::find(syms.begin(), syms.end(), "NR");
    const std::ptrdiff_t nr = nr_it == syms.end() ? -1 : nr_it - syms.begin();

    // 1. drop NR, rescale each row by 1/(1 - p_NR)
    std::vector<std::string> syms1;
    for (std::size_t j = 0; j < n; ++j)
        if (std::ptrdiff_t(j) != nr) syms1.push_back(syms[j]);
    const std::size_t n1 = syms1.size();
    std::vector<double> p1;
    p1.reserve(n1 * n1);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::ptrdiff_t(i) == nr) continue;
        const double pnr = nr < 0 ? 0.0 : raw.probs[i * n + nr];
        if (pnr >= 1.0)
            throw std::invalid_argument("normalize_and_merge: NR probability is 1 in row '" +
                                        syms[i] + "'");
        for (std::size_t j = 0; j < n; ++j) {
            if (std::ptrdiff_t(j) == nr) continue;
            p1.push_back(raw.probs[i * n + j] / (1.0 - pnr));
        }
    }

    // 2. collapse merge_from and everything worse into 'Cs'
    if (syms1.empty() || syms1.back() != "D")
        throw std::invalid_argument("normalize_and_merge: last grade must be 'D'");
    const auto mit = std::find(syms1.begin(), syms1.end(), merge_from);
    if (mit == syms1.end())
        throw std::invalid_argument("normalize_and_merge: merge grade '" + merge_from +
                                    "' not on scale");
    const std::size_t m0 = mit - syms1.begin();   // first merged column
    const std::size_t m1 = n1 - 2;                // last non-default column
    if (m0 > m1)
        throw std::invalid_argument("normalize_and_merge: cannot merge the default state");

    std::vector<std::string> syms2(syms1.begin(), syms1.begin() + m0);
    syms2.push_back("Cs");
    syms2.push_back("D");
    const std::size_t n2 = syms2.size();

    std::vector<double> p2(n2 * n2, 0.0);
    auto col2 = [&](std::size_t j1) { return j1 < m0 ? j1 : (j1 <= m1 ? m0 : m0 + 1); };
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        const std::size_t i2 = col2(i1);
        const double row_weight = (i1 >= m0 && i1 <= m1) ? 1.0 / double(m1 - m0 + 1) : 1.0;
        for (std::size_t j1 = 0; j1 < n1; ++j1)
            p2[i2 * n2 + col2(j1)] += row_weight * p1[i1 * n1 + j1];
    }

    auto scale = RatingScale::from_file_order(syms2);
    const int ns = scale.states();
    std::vector<double> p(std::size_t(ns) * ns);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j)
            p[(ns - 1 - i) * ns + (ns - 1 - j)] = p2[std::size_t(i) * ns + j];
    p = rescale_rows(std::move(p), ns, "normalize_and_merge");
    return TransitionMatrix(std::move(scale), std::move(p));
}

ThresholdTable::ThresholdTable(const TransitionMatrix& tm) : cols_(tm.states()) {
    const int n = cols_;
    c_.assign(std::size_t(n) * n, std::numeric_limits<double>::infinity());
    for (int g = 0; g < n; ++g) {
        double cum = 0.0;
        for (int s = 0; s < n - 1; ++s) {
            cum += tm.prob(g, s);
            const double clipped = std::clamp(cum, kCumClip, 1.0 - kCumClip);
            c_[g * n + s] = normal_quantile(clipped);
        }
    }
}

int ThresholdTable::bucket(int grade, double y) const {
    const double* r = row(grade);
    // first state whose upper cutoff is >= y
    int lo = 0, hi = cols_ - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (r[mid] < y)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

CumulativePdTable::CumulativePdTable(const TransitionMatrix& tm, double max_horizon)
    : states_(tm.states()) {
    if (max_horizon < 0.0)
        throw std::invalid_argument("CumulativePdTable: negative horizon");
    years_ = int(std::ceil(max_horizon - 1e-12));
    const int n = states_;
    cum_.assign(std::size_t(years_ + 1) * n, 0.0);
    std::vector<double> power(tm.data());  // M^1
    for (int y = 1; y <= years_; ++y) {
        for (int g = 0; g < n; ++g) cum_[std::size_t(y) * n + g] = power[g * n + 0];
        if (y == years_) break;
        // power <- power * M
        std::vector<double> next(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const double v = power[i * n + k];
                if (v == 0.0) continue;
                for (int j = 0; j < n; ++j) next[i * n + j] += v * tm.prob(k, j);
            }
        power = std::move(next);
    }
}

double CumulativePdTable::pd(int grade, double t) const {
    if (t < 0.0) throw std::invalid_argument("pd_term_structure: t must be >= 0");
    if (t > years_ + 1e-9)
        throw std::invalid_argument("pd_term_structure: t beyond built horizon");
    const int lo = int(std::floor(t));
    const double frac = t - lo;
    const double p_lo = cum_[std::size_t(lo) * states_ + grade];
    if (frac < 1e-12 || lo >= years_) return p_lo;
    const double p_hi = cum_[std::size_t(lo + 1) * states_ + grade];
    return p_lo + frac * (p_hi - p_lo);
}

double pd_term_structure(const TransitionMatrix& tm, int grade, double t) {
    if (t < 0.0) throw std::invalid_argument("pd_term_structure: t must be >= 0");
    if (grade < 0 || grade >= tm.states())
        throw std::invalid_argument("pd_term_structure: grade out of range");
    CumulativePdTable table(tm, std::max(t, 1.0));
    return table.pd(grade, t);
}

TransitionMatrix matrix_power(const TransitionMatrix& tm, int k) {
    if (k < 1) throw std::invalid_argument("matrix_power: k must be >= 1");
    const int n = tm.states();
    std::vector<double> power(tm.data());
    for (int step = 1; step < k; ++step) {
        std::vector<double> next(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m) {
                const double v = power[std::size_t(i) * n + m];
                if (v == 0.0) continue;
                for (int j = 0; j < n; ++j) next[std::size_t(i) * n + j] += v * tm.prob(m, j);
            }
        power = std::move(next);
    }
    // squash accumulation drift so the row-sum invariant holds exactly
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += power[std::size_t(i) * n + j];
        for (int j = 0; j < n; ++j) power[std::size_t(i) * n + j] /= s;
    }
    return TransitionMatrix(tm.scale(), std::move(power));
}

double risk_neutral_pd(double p, double rho, double horizon, double psi) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("risk_neutral_pd: p must lie strictly in (0,1)");
    if (rho < 0.0 || rho >= 1.0)
        throw std::invalid_argument("risk_neutral_pd: rho must lie in [0,1)");
    if (!(horizon > 0.0))
        throw std::invalid_argument("risk_neutral_pd: horizon must be positive");
    return normal_cdf(normal_quantile(p) + psi * std::sqrt(horizon) * std::sqrt(rho));
}

}  // namespace concrisk
