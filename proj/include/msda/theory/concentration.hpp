#pragma once

#include <cstdint>
#include <vector>

#include "msda/matrix.hpp"
#include "msda/theory/hypothesis.hpp"

namespace msda::theory {

// Finite-support distribution with a deterministic binary labeling, so
// population risks and divergences are exactly computable.
struct DiscreteDomainSpec {
    Matrix support;            // one row per atom
    std::vector<double> probs; // non-negative, sums to 1
    std::vector<int> labels;   // {0,1}, one per atom

    void validate() const;
};

struct ConcentrationResult {
    double violation_rate = 0.0;
    double epsilon = 0.0;
    int trials = 0;
};

// Draws m points per domain per trial and counts how often the empirical
// multi-source divergence strays from the exact population value by more
// than the deviation allowance for confidence 1 - delta.
ConcentrationResult concentration_mc_discrepancy(const DiscreteDomainSpec& target,
                                                 const std::vector<DiscreteDomainSpec>& sources,
                                                 const FiniteHypothesisClass& cls,
                                                 int m, int d, double delta, int trials,
                                                 std::uint64_t seed);

// Same experiment for sup over the class of |worst population source risk
// minus worst empirical source risk|.
ConcentrationResult concentration_mc_source_risk(const std::vector<DiscreteDomainSpec>& sources,
                                                 const FiniteHypothesisClass& cls,
                                                 int m, int d, double delta, int trials,
                                                 std::uint64_t seed);

} // namespace msda::theory
