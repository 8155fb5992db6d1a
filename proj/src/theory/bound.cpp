#include "msda/theory/bound.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "msda/error.hpp"
#include "msda/theory/divergence.hpp"

namespace msda::theory {

namespace {

constexpr double kEuler = 2.718281828459045235360287471352662498;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ConcTerms conc_terms(int k, int m, int d, double delta) {
    if (k < 1) {
        throw InputError("need at least one source domain");
    }
    if (d < 1) {
        throw InputError("VC dimension must be at least 1");
    }
    if (m < d) {
        throw InputError("sample size below VC dimension");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InputError("confidence level must lie in (0, 1)");
    }
    const double md = static_cast<double>(m);
    const double dd = static_cast<double>(d);
    const double kd = static_cast<double>(k);
    ConcTerms t;
    t.risk_term = std::sqrt((1.0 / (2.0 * md)) *
                            (std::log(4.0 * kd / delta) + dd * std::log(md * kEuler / dd)));
    t.disc_term = std::sqrt((2.0 / md) *
                            (std::log(8.0 * kd / delta) +
                             2.0 * dd * std::log(md * kEuler / (2.0 * dd))));
    return t;
}

JointRiskResult optimal_joint_risk(const FiniteHypothesisClass& cls,
                                   const data::LabeledDomain& target,
                                   const std::vector<data::LabeledDomain>& sources) {
    if (cls.size() == 0) {
        throw InputError("joint risk over an empty hypothesis class");
    }
    if (sources.empty()) {
        throw InputError("joint risk needs at least one source");
    }
    if (target.y.size() != target.x.rows() || target.x.rows() == 0) {
        throw ModeError("joint risk needs a labeled target");
    }
    JointRiskResult best;
    best.lambda = std::numeric_limits<double>::infinity();
    for (std::size_t hi = 0; hi < cls.size(); ++hi) {
        const Hypothesis& h = cls.hypotheses[hi];
        double worst_src = 0.0;
        for (const data::LabeledDomain& s : sources) {
            worst_src = std::max(worst_src, empirical_risk_01(h, s));
        }
        const double joint = empirical_risk_01(h, target) + worst_src;
        if (joint < best.lambda) {
            best.lambda = joint;
            best.h_index = hi;
        }
    }
    return best;
}

BoundReport assemble_bound(const FiniteHypothesisClass& cls, const Hypothesis& h,
                           const Matrix& target_x,
                           const std::vector<data::LabeledDomain>& sources,
                           const std::optional<data::LabeledDomain>& target_labeled,
                           double delta) {
    if (sources.empty()) {
        throw InputError("bound needs at least one source");
    }
    BoundReport r;
    r.k = static_cast<int>(sources.size());
    r.d = cls.vc_dim;
    r.delta = delta;

    std::size_t m = target_x.rows();
    std::vector<Matrix> source_x;
    source_x.reserve(sources.size());
    for (const data::LabeledDomain& s : sources) {
        r.worst_source_risk = std::max(r.worst_source_risk, empirical_risk_01(h, s));
        m = std::min(m, s.x.rows());
        source_x.push_back(s.x);
    }
    r.m = static_cast<int>(m);

    r.discrepancy_hdh = multi_discrepancy(SymDiffClass(cls), target_x, source_x).value;

    const ConcTerms ct = conc_terms(r.k, r.m, r.d, delta);
    r.risk_conc_term = ct.risk_term;
    r.disc_conc_term = ct.disc_term;

    if (target_labeled) {
        r.lambda = optimal_joint_risk(cls, *target_labeled, sources).lambda;
        r.lambda_available = true;
    }

    r.total = r.worst_source_risk + 0.5 * r.discrepancy_hdh + r.risk_conc_term +
              r.disc_conc_term + (r.lambda_available ? r.lambda : 0.0);
    return r;
}

double verify_population_bound(const FiniteHypothesisClass& cls, const Hypothesis& h,
                               const data::LabeledDomain& target,
                               const std::vector<data::LabeledDomain>& sources) {
    if (sources.empty()) {
        throw InputError("bound check needs at least one source");
    }
    double worst_src = 0.0;
    std::vector<Matrix> source_x;
    source_x.reserve(sources.size());
    for (const data::LabeledDomain& s : sources) {
        worst_src = std::max(worst_src, empirical_risk_01(h, s));
        source_x.push_back(s.x);
    }
    const double lambda = optimal_joint_risk(cls, target, sources).lambda;
    const double disc = multi_discrepancy(SymDiffClass(cls), target.x, source_x).value;
    const double lhs = empirical_risk_01(h, target);
    return worst_src + lambda + 0.5 * disc - lhs;
}

std::string format_bound_report(const BoundReport& r) {
    std::ostringstream out;
    out << "k = " << r.k << "\n";
    out << "m = " << r.m << "\n";
    out << "d = " << r.d << "\n";
    out << "delta = " << fmt(r.delta) << "\n";
    out << "worst_source_risk = " << fmt(r.worst_source_risk) << "\n";
    out << "discrepancy_hdh = " << fmt(r.discrepancy_hdh) << "\n";
    out << "lambda = " << (r.lambda_available ? fmt(r.lambda) : std::string("unavailable"))
        << "\n";
    out << "risk_conc_term = " << fmt(r.risk_conc_term) << "\n";
    out << "disc_conc_term = " << fmt(r.disc_conc_term) << "\n";
    out << "total = " << fmt(r.total) << "\n";
    return out.str();
}

} // namespace msda::theory
