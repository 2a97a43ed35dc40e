#pragma once

#include <string>
#include <vector>

namespace concrisk {

// State 0 is the absorbing default state 'D'; indices rise from the worst
// non-default grade to the best. Files list grades best-to-worst with D last,
// so loaders reverse the order.
class RatingScale {
  public:
    static constexpr int kDefault = 0;

    // symbols in internal order: D first, then worst to best
    explicit RatingScale(std::vector<std::string> symbols);
    static RatingScale from_file_order(const std::vector<std::string>& best_to_worst_d);

    int states() const { return int(symbols_.size()); }   // S + 1
    int grades() const { return states() - 1; }           // S
    int index(const std::string& symbol) const;           // throws on unknown
    const std::string& symbol(int state) const { return symbols_.at(state); }

  private:
    std::vector<std::string> symbols_;
};

class TransitionMatrix {
  public:
    // probs row-major over internal state order, rows already stochastic
    TransitionMatrix(RatingScale scale, std::vector<double> probs);

    const RatingScale& scale() const { return scale_; }
    int states() const { return scale_.states(); }
    double prob(int from, int to) const { return p_[from * states() + to]; }
    double default_prob(int grade) const { return prob(grade, RatingScale::kDefault); }
    const std::vector<double>& data() const { return p_; }

  private:
    RatingScale scale_;
    std::vector<double> p_;
};

// CSV in percent, columns best->worst->D; rows rescaled to sum exactly to 1,
// rejected when off by more than 0.05% (published tables are rounded).
TransitionMatrix load_transition_matrix(const std::string& path);

// An un-normalized table as published: may carry an NR column and a finer
// grade scale than the engine uses. Fractions, not percent.
struct RawTransitionTable {
    std::vector<std::string> symbols_file_order;  // best->worst->D, may include NR anywhere
    std::vector<double> probs;                    // row-major in file order
};
RawTransitionTable load_raw_transition_table(const std::string& path);

// Drops the NR column (rescaling each row by 1/(1-p_NR)) and collapses all
// grades at or below merge_from into a single 'Cs' grade: destination columns
// are summed, source rows combined as an unweighted average.
TransitionMatrix normalize_and_merge(const RawTransitionTable& raw,
                                     const std::string& merge_from);

// Latent-return cutoffs C[g][s] = Phi^-1(sum_{i<=s} p_gi), cumulative sums
// clipped to [1e-12, 1-1e-12]; C[g][S] = +inf.
class ThresholdTable {
  public:
    explicit ThresholdTable(const TransitionMatrix& tm);
    double cutoff(int grade, int state) const { return c_[grade * cols_ + state]; }
    int bucket(int grade, double y) const;  // state index for a latent return
    const double* row(int grade) const { return &c_[grade * cols_]; }
    int states() const { return cols_; }

  private:
    int cols_;
    std::vector<double> c_;
};

// Cumulative PDs p_g(0,t) from powers of the annual matrix, linear in t
// between integer years.
class CumulativePdTable {
  public:
    CumulativePdTable(const TransitionMatrix& tm, double max_horizon);
    double pd(int grade, double t) const;

  private:
    int years_;
    int states_;
    std::vector<double> cum_;  // [year][grade]
};

double pd_term_structure(const TransitionMatrix& tm, int grade, double t);

// k-step transition matrix (k whole years), same scale.
TransitionMatrix matrix_power(const TransitionMatrix& tm, int k);

// KMV-style transform to risk-neutral PDs.
double risk_neutral_pd(double p, double rho, double horizon, double psi);

}  // namespace concrisk
