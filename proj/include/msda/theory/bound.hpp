#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msda/data/domain.hpp"
#include "msda/theory/hypothesis.hpp"

namespace msda::theory {

struct ConcTerms {
    double risk_term = 0.0; // deviation allowance for the worst source risk
    double disc_term = 0.0; // deviation allowance for the discrepancy
};

// Finite-sample penalty terms for k domains of m points each under a class
// of VC dimension d, at confidence 1 - delta. The discrepancy term already
// accounts for the doubled VC dimension of the XOR class.
ConcTerms conc_terms(int k, int m, int d, double delta);

struct JointRiskResult {
    std::size_t h_index = 0;
    double lambda = 0.0; // min over h of target risk + worst source risk
};

// Exhaustive search for the hypothesis minimizing target risk plus worst
// source risk. Needs target labels; ties broken by lowest index.
JointRiskResult optimal_joint_risk(const FiniteHypothesisClass& cls,
                                   const data::LabeledDomain& target,
                                   const std::vector<data::LabeledDomain>& sources);

struct BoundReport {
    double worst_source_risk = 0.0;
    double discrepancy_hdh = 0.0;
    bool lambda_available = false;
    double lambda = 0.0;
    double risk_conc_term = 0.0;
    double disc_conc_term = 0.0;
    double total = 0.0;
    int k = 0;
    int m = 0;
    int d = 0;
    double delta = 0.0;
};

// Evaluates every term of the finite-sample target-risk bound for a fixed
// hypothesis. The joint-risk term is filled only when labeled target data
// is supplied; otherwise the total excludes it and the flag says so.
// m is the smallest domain size; risks and discrepancies use full samples.
BoundReport assemble_bound(const FiniteHypothesisClass& cls, const Hypothesis& h,
                           const Matrix& target_x,
                           const std::vector<data::LabeledDomain>& sources,
                           const std::optional<data::LabeledDomain>& target_labeled,
                           double delta);

// Treats the given samples as whole populations and returns
// rhs - lhs for: target risk <= worst source risk + lambda + disc/2.
// Non-negative for every hypothesis in the class.
double verify_population_bound(const FiniteHypothesisClass& cls, const Hypothesis& h,
                               const data::LabeledDomain& target,
                               const std::vector<data::LabeledDomain>& sources);

// Flat key = value text block, one line per field.
std::string format_bound_report(const BoundReport& report);

} // namespace msda::theory
