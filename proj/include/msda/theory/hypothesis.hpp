#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "msda/data/domain.hpp"
#include "msda/matrix.hpp"

namespace msda::theory {

// Binary classifier: either a constant label or a one-feature threshold rule.
struct Hypothesis {
    enum class Kind { Constant, Stump };

    Kind kind = Kind::Constant;
    int constant_label = 0;
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 1; // +1: predict 1 iff x[f] >= t;  -1: predict 1 iff x[f] < t

    static Hypothesis constant(int label);
    static Hypothesis stump(std::size_t feature, double threshold, int polarity);

    int predict(const double* x, std::size_t dim) const;
    Hypothesis complement() const;
};

struct FiniteHypothesisClass {
    std::vector<Hypothesis> hypotheses;
    int vc_dim = 1;

    std::size_t size() const { return hypotheses.size(); }
    int predict(std::size_t h, const double* x, std::size_t dim) const;

    // Per-hypothesis 0/1 predictions over every row of x.
    std::vector<std::vector<std::uint8_t>> behaviors(const Matrix& x) const;
    bool complement_closed_on(const Matrix& reference) const;
};

// All XOR pairs (h, h') over a base class, including h == h'.
// Pairs are indexed flat as i * |H| + j.
class SymDiffClass {
public:
    explicit SymDiffClass(FiniteHypothesisClass base);

    const FiniteHypothesisClass& base() const { return base_; }
    std::size_t size() const { return base_.size() * base_.size(); }
    std::pair<std::size_t, std::size_t> pair(std::size_t idx) const;
    int predict(std::size_t idx, const double* x, std::size_t dim) const;

private:
    FiniteHypothesisClass base_;
};

// Thresholds sit at midpoints between sorted distinct values of each
// feature, with -inf/+inf sentinels, in both polarities, plus the two
// constants. Hypotheses with identical behavior on the sample are
// deduplicated (keeping the first), which preserves complement closure.
FiniteHypothesisClass enumerate_stumps(const Matrix& sample);

// Fraction of points misclassified under the 0-1 loss.
double empirical_risk_01(const Hypothesis& h, const data::LabeledDomain& dom);

} // namespace msda::theory
