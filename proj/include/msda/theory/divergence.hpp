#pragma once

#include <cstdint>
#include <vector>

#include "msda/matrix.hpp"
#include "msda/theory/hypothesis.hpp"

namespace msda::theory {

struct DiscrepancyResult {
    double value = 0.0;
    std::size_t argmax_index = 0; // source index attaining the max, lowest on ties
};

// 2 * max over the class of |Pr_A(h = 1) - Pr_B(h = 1)| on the empirical
// measures of the two samples.
double h_divergence(const FiniteHypothesisClass& cls, const Matrix& a, const Matrix& b);
double h_divergence(const SymDiffClass& cls, const Matrix& a, const Matrix& b);

// max over sources of the pairwise divergence against the target.
DiscrepancyResult multi_discrepancy(const FiniteHypothesisClass& cls, const Matrix& target,
                                    const std::vector<Matrix>& sources);
DiscrepancyResult multi_discrepancy(const SymDiffClass& cls, const Matrix& target,
                                    const std::vector<Matrix>& sources);

struct DiscErrorIdentityResult {
    double value = 0.0;
    std::size_t argmax_index = 0;
    std::vector<double> min_balanced_errors;             // one per source
    std::vector<std::vector<std::size_t>> kept_indices;  // slot 0 target, then sources
};

// Discrepancy recovered from domain-classification accuracy: train nothing,
// just scan every XOR pair for the lowest balanced error at telling target
// from each source, and convert via value_i = 2 * (1 - 2 * min_err_i).
// Domains are trimmed to the smallest size by seeded subsampling without
// replacement so both sides of the identity see the same points.
DiscErrorIdentityResult disc_error_identity(const FiniteHypothesisClass& cls,
                                            const Matrix& target,
                                            const std::vector<Matrix>& sources,
                                            std::uint64_t seed);

} // namespace msda::theory
