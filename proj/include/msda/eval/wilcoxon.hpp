#pragma once

#include <vector>

namespace msda::eval {

struct WilcoxonResult {
    double statistic = 0.0;   // min of the positive and negative rank sums
    double p_two_sided = 1.0;
    int n_effective = 0;      // pairs left after dropping zero differences
};

// Paired signed-rank test. Zero differences are dropped; tied absolute
// differences share their average rank. The two-sided p-value is exact
// (full sign enumeration) up to 12 effective pairs and uses the normal
// approximation with continuity correction beyond that. All pairs equal
// gives p = 1.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

} // namespace msda::eval
