#include "msda/theory/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msda/error.hpp"
#include "msda/rng.hpp"
#include "msda/theory/divergence.hpp"

namespace msda::theory {

namespace {

constexpr double kEuler = 2.718281828459045235360287471352662498;

std::vector<double> cumulative(const std::vector<double>& probs) {
    std::vector<double> cum(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;
    return cum;
}

Matrix draw_sample(const DiscreteDomainSpec& spec, const std::vector<double>& cum, int m,
                   Rng& rng) {
    Matrix x(static_cast<std::size_t>(m), spec.support.cols());
    for (int r = 0; r < m; ++r) {
        const double u = rng.uniform();
        const std::size_t atom =
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
        const std::size_t a = std::min(atom, spec.support.rows() - 1);
        for (std::size_t c = 0; c < spec.support.cols(); ++c) {
            x(static_cast<std::size_t>(r), c) = spec.support(a, c);
        }
    }
    return x;
}

// Pr over the population that the hypothesis predicts 1.
std::vector<double> population_one_probs(const FiniteHypothesisClass& cls,
                                         const DiscreteDomainSpec& spec) {
    std::vector<double> q(cls.size(), 0.0);
    for (std::size_t h = 0; h < cls.size(); ++h) {
        for (std::size_t a = 0; a < spec.support.rows(); ++a) {
            q[h] += spec.probs[a] *
                    cls.predict(h, spec.support.row_ptr(a), spec.support.cols());
        }
    }
    return q;
}

std::vector<double> population_risks(const FiniteHypothesisClass& cls,
                                     const DiscreteDomainSpec& spec) {
    std::vector<double> risk(cls.size(), 0.0);
    for (std::size_t h = 0; h < cls.size(); ++h) {
        for (std::size_t a = 0; a < spec.support.rows(); ++a) {
            const int pred = cls.predict(h, spec.support.row_ptr(a), spec.support.cols());
            if (pred != spec.labels[a]) {
                risk[h] += spec.probs[a];
            }
        }
    }
    return risk;
}

void check_args(int m, int d, double delta, int trials) {
    if (m < 1 || d < 1 || trials < 1) {
        throw InputError("sample size, VC dimension, and trials must be positive");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InputError("confidence level must lie in (0, 1)");
    }
}

} // namespace

void DiscreteDomainSpec::validate() const {
    if (support.rows() == 0) {
        throw InputError("discrete domain has no atoms");
    }
    if (probs.size() != support.rows() || labels.size() != support.rows()) {
        throw ShapeError("atom, probability, and label counts differ");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) {
            throw InputError("atom probability is negative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InputError("atom probabilities do not sum to 1");
    }
    for (int l : labels) {
        if (l != 0 && l != 1) {
            throw InputError("atom label must be 0 or 1");
        }
    }
    if (!support.all_finite()) {
        throw InputError("atom coordinates must be finite");
    }
}

ConcentrationResult concentration_mc_discrepancy(const DiscreteDomainSpec& target,
                                                 const std::vector<DiscreteDomainSpec>& sources,
                                                 const FiniteHypothesisClass& cls,
                                                 int m, int d, double delta, int trials,
                                                 std::uint64_t seed) {
    check_args(m, d, delta, trials);
    if (sources.empty()) {
        throw InputError("concentration check needs at least one source");
    }
    target.validate();
    for (const auto& s : sources) {
        s.validate();
    }
    const auto k = static_cast<double>(sources.size());
    const double dd = d;
    ConcentrationResult out;
    out.trials = trials;
    out.epsilon = 2.0 * std::sqrt((2.0 / m) * (std::log(4.0 * k / delta) +
                                               dd * std::log(kEuler * m / dd)));

    const std::vector<double> qt = population_one_probs(cls, target);
    double pop = 0.0;
    for (const auto& s : sources) {
        const std::vector<double> qs = population_one_probs(cls, s);
        double pair = 0.0;
        for (std::size_t h = 0; h < cls.size(); ++h) {
            pair = std::max(pair, 2.0 * std::abs(qt[h] - qs[h]));
        }
        pop = std::max(pop, pair);
    }

    const std::vector<double> cum_t = cumulative(target.probs);
    std::vector<std::vector<double>> cum_s;
    for (const auto& s : sources) {
        cum_s.push_back(cumulative(s.probs));
    }

    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
        const Matrix xt = draw_sample(target, cum_t, m, rng);
        std::vector<Matrix> xs;
        xs.reserve(sources.size());
        for (std::size_t i = 0; i < sources.size(); ++i) {
            xs.push_back(draw_sample(sources[i], cum_s[i], m, rng));
        }
        const double emp = multi_discrepancy(cls, xt, xs).value;
        if (std::abs(pop - emp) > out.epsilon) {
            ++violations;
        }
    }
    out.violation_rate = static_cast<double>(violations) / trials;
    return out;
}

ConcentrationResult concentration_mc_source_risk(const std::vector<DiscreteDomainSpec>& sources,
                                                 const FiniteHypothesisClass& cls,
                                                 int m, int d, double delta, int trials,
                                                 std::uint64_t seed) {
    check_args(m, d, delta, trials);
    if (sources.empty()) {
        throw InputError("concentration check needs at least one source");
    }
    for (const auto& s : sources) {
        s.validate();
    }
    const auto k = static_cast<double>(sources.size());
    const double dd = d;
    ConcentrationResult out;
    out.trials = trials;
    out.epsilon = std::sqrt((1.0 / (2.0 * m)) *
                            (std::log(2.0 * k / delta) + dd * std::log(m * kEuler / dd)));

    std::vector<std::vector<double>> pop_risk;
    pop_risk.reserve(sources.size());
    for (const auto& s : sources) {
        pop_risk.push_back(population_risks(cls, s));
    }
    std::vector<std::vector<double>> cum_s;
    for (const auto& s : sources) {
        cum_s.push_back(cumulative(s.probs));
    }

    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
        // Empirical risks per hypothesis per source for this trial's draw.
        std::vector<std::vector<double>> emp_risk(sources.size());
        for (std::size_t i = 0; i < sources.size(); ++i) {
            const Matrix x = draw_sample(sources[i], cum_s[i], m, rng);
            // Recover atom labels by matching rows back to the support.
            emp_risk[i].assign(cls.size(), 0.0);
            for (std::size_t r = 0; r < x.rows(); ++r) {
                std::size_t atom = 0;
                for (std::size_t a = 0; a < sources[i].support.rows(); ++a) {
                    bool same = true;
                    for (std::size_t c = 0; c < x.cols(); ++c) {
                        if (x(r, c) != sources[i].support(a, c)) {
                            same = false;
                            break;
                        }
                    }
                    if (same) {
                        atom = a;
                        break;
                    }
                }
                for (std::size_t h = 0; h < cls.size(); ++h) {
                    const int pred = cls.predict(h, x.row_ptr(r), x.cols());
                    if (pred != sources[i].labels[atom]) {
                        emp_risk[i][h] += 1.0;
                    }
                }
            }
            for (double& v : emp_risk[i]) {
                v /= m;
            }
        }
        double sup_dev = 0.0;
        for (std::size_t h = 0; h < cls.size(); ++h) {
            double pop_worst = 0.0, emp_worst = 0.0;
            for (std::size_t i = 0; i < sources.size(); ++i) {
                pop_worst = std::max(pop_worst, pop_risk[i][h]);
                emp_worst = std::max(emp_worst, emp_risk[i][h]);
            }
            sup_dev = std::max(sup_dev, std::abs(pop_worst - emp_worst));
        }
        if (sup_dev > out.epsilon) {
            ++violations;
        }
    }
    out.violation_rate = static_cast<double>(violations) / trials;
    return out;
}

} // namespace msda::theory
