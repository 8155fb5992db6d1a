#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "msda/data/domain.hpp"
#include "msda/error.hpp"
#include "msda/matrix.hpp"
#include "msda/rng.hpp"
#include "msda/theory/bound.hpp"
#include "msda/theory/concentration.hpp"
#include "msda/theory/divergence.hpp"
#include "msda/theory/hypothesis.hpp"
#include "msda/theory/lse.hpp"

using namespace msda;
using namespace msda::theory;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

std::vector<int> random_labels(std::size_t n, Rng& rng) {
    std::vector<int> y(n);
    for (int& v : y) v = static_cast<int>(rng.uniform_index(2));
    return y;
}

// Direct per-hypothesis scan sharing nothing with the packed implementation.
double brute_divergence(const FiniteHypothesisClass& cls, const Matrix& a, const Matrix& b) {
    double best = 0.0;
    for (std::size_t h = 0; h < cls.size(); ++h) {
        double ca = 0.0, cb = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            ca += cls.predict(h, a.row_ptr(r), a.cols());
        }
        for (std::size_t r = 0; r < b.rows(); ++r) {
            cb += cls.predict(h, b.row_ptr(r), b.cols());
        }
        best = std::max(best, std::abs(ca / double(a.rows()) - cb / double(b.rows())));
    }
    return 2.0 * best;
}

double brute_divergence_xor(const FiniteHypothesisClass& cls, const Matrix& a,
                            const Matrix& b) {
    double best = 0.0;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        for (std::size_t j = 0; j < cls.size(); ++j) {
            double ca = 0.0, cb = 0.0;
            for (std::size_t r = 0; r < a.rows(); ++r) {
                ca += cls.predict(i, a.row_ptr(r), a.cols()) !=
                      cls.predict(j, a.row_ptr(r), a.cols());
            }
            for (std::size_t r = 0; r < b.rows(); ++r) {
                cb += cls.predict(i, b.row_ptr(r), b.cols()) !=
                      cls.predict(j, b.row_ptr(r), b.cols());
            }
            best = std::max(best, std::abs(ca / double(a.rows()) - cb / double(b.rows())));
        }
    }
    return 2.0 * best;
}

} // namespace

TEST_CASE("hypothesis predict and complement semantics") {
    const double x[2] = {1.5, -0.5};
    const Hypothesis up = Hypothesis::stump(0, 1.0, 1);
    const Hypothesis dn = Hypothesis::stump(0, 1.0, -1);
    CHECK(up.predict(x, 2) == 1);
    CHECK(dn.predict(x, 2) == 0);
    CHECK(up.complement().predict(x, 2) == 0);

    const Hypothesis one = Hypothesis::constant(1);
    CHECK(one.predict(x, 2) == 1);
    CHECK(one.complement().predict(x, 2) == 0);

    const Hypothesis f1 = Hypothesis::stump(1, -1.0, 1);
    CHECK(f1.predict(x, 2) == 1); // -0.5 >= -1.0
}

TEST_CASE("stump enumeration realizes exactly the threshold dichotomies") {
    // 1-D distinct points: the deduplicated class has the two constants plus
    // every proper one-sided split in both orientations, 2n behaviors total.
    const Matrix sample(5, 1, {0.1, -1.0, 2.0, 0.7, -0.3});
    const FiniteHypothesisClass cls = enumerate_stumps(sample);
    CHECK(cls.vc_dim == 2);
    CHECK(cls.size() == 10);

    const auto beh = cls.behaviors(sample);
    std::set<std::vector<std::uint8_t>> got(beh.begin(), beh.end());
    CHECK(got.size() == cls.size()); // no duplicated behavior survives

    // Expected set built independently: for each cut position between sorted
    // values take [x >= t] and its complement.
    std::vector<double> sorted = {-1.0, -0.3, 0.1, 0.7, 2.0};
    std::set<std::vector<std::uint8_t>> want;
    std::vector<double> cuts = {-1e308};
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        cuts.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    }
    cuts.push_back(1e308);
    for (double t : cuts) {
        std::vector<std::uint8_t> ge(5), lt(5);
        for (std::size_t r = 0; r < 5; ++r) {
            ge[r] = sample(r, 0) >= t ? 1 : 0;
            lt[r] = 1 - ge[r];
        }
        want.insert(ge);
        want.insert(lt);
    }
    CHECK(got == want);
}

TEST_CASE("stump class shatters any two distinct 1-D points") {
    const Matrix pts(2, 1, {0.2, 1.4});
    const FiniteHypothesisClass cls = enumerate_stumps(pts);
    std::set<std::vector<std::uint8_t>> got;
    for (const auto& b : cls.behaviors(pts)) got.insert(b);
    CHECK(got.size() == 4); // all 2^2 dichotomies
}

TEST_CASE("enumeration stays complement-closed and covers all features") {
    Rng rng(11);
    const Matrix sample = random_matrix(8, 3, rng);
    const FiniteHypothesisClass cls = enumerate_stumps(sample);
    CHECK(cls.vc_dim == 3); // floor(log2(3)) + 2
    CHECK(cls.complement_closed_on(sample));

    const auto beh = cls.behaviors(sample);
    std::set<std::vector<std::uint8_t>> got(beh.begin(), beh.end());
    for (const auto& b : beh) {
        std::vector<std::uint8_t> flip(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) flip[i] = 1 - b[i];
        CHECK(got.count(flip) == 1);
    }
    CHECK_THROWS_AS(enumerate_stumps(Matrix(0, 2)), InputError);
}

TEST_CASE("empirical 0-1 risk") {
    data::LabeledDomain d;
    d.x = Matrix(4, 1, {-1.0, 0.5, 1.5, 3.0});
    d.y = {0, 0, 1, 1};
    CHECK(empirical_risk_01(Hypothesis::stump(0, 1.0, 1), d) == 0.0);
    CHECK(empirical_risk_01(Hypothesis::stump(0, 1.0, -1), d) == 1.0);
    CHECK(empirical_risk_01(Hypothesis::constant(1), d) == 0.5);
    CHECK(empirical_risk_01(Hypothesis::stump(0, 2.0, 1), d) == 0.25);
}

TEST_CASE("h-divergence matches a brute-force hypothesis scan") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t dim = 1 + rng.uniform_index(2);
        const Matrix a = random_matrix(2 + rng.uniform_index(7), dim, rng);
        const Matrix b = random_matrix(2 + rng.uniform_index(7), dim, rng, -0.5, 1.5);
        const FiniteHypothesisClass cls = enumerate_stumps(vstack(a, b));
        CHECK(h_divergence(cls, a, b) ==
              doctest::Approx(brute_divergence(cls, a, b)).epsilon(1e-12));
        CHECK(h_divergence(SymDiffClass(cls), a, b) ==
              doctest::Approx(brute_divergence_xor(cls, a, b)).epsilon(1e-12));
    }
}

TEST_CASE("h-divergence basic properties") {
    Rng rng(32);
    const Matrix a = random_matrix(6, 2, rng);
    const Matrix b = random_matrix(9, 2, rng, 0.0, 2.0);
    const FiniteHypothesisClass cls = enumerate_stumps(vstack(a, b));
    const double ab = h_divergence(cls, a, b);
    CHECK(ab == h_divergence(cls, b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 2.0);
    CHECK(h_divergence(cls, a, a) == 0.0);

    // Disjoint supports + a class containing a separating stump: maximum gap.
    const Matrix lo(4, 1, {0.0, 0.1, 0.2, 0.3});
    const Matrix hi(4, 1, {5.0, 5.1, 5.2, 5.3});
    const FiniteHypothesisClass sep = enumerate_stumps(vstack(lo, hi));
    CHECK(h_divergence(sep, lo, hi) == 2.0);
}

TEST_CASE("multi-source discrepancy is the worst pairwise divergence") {
    Rng rng(33);
    const Matrix target = random_matrix(8, 1, rng);
    std::vector<Matrix> sources;
    Matrix all = target;
    for (int i = 0; i < 3; ++i) {
        sources.push_back(random_matrix(8, 1, rng, -1.0 + i, 1.0 + i));
        all = vstack(all, sources.back());
    }
    const FiniteHypothesisClass cls = enumerate_stumps(all);

    const DiscrepancyResult got = multi_discrepancy(cls, target, sources);
    double want = 0.0;
    std::size_t want_idx = 0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const double v = h_divergence(cls, target, sources[i]);
        if (v > want) {
            want = v;
            want_idx = i;
        }
    }
    CHECK(got.value == want);
    CHECK(got.argmax_index == want_idx);

    // Identical sources tie; the lowest index must win.
    const std::vector<Matrix> twins = {sources[2], sources[2]};
    CHECK(multi_discrepancy(cls, target, twins).argmax_index == 0);
    CHECK_THROWS_AS(multi_discrepancy(cls, target, {}), InputError);
}

TEST_CASE("symdiff pair indexing and xor prediction") {
    const Matrix sample(3, 1, {0.0, 1.0, 2.0});
    const FiniteHypothesisClass cls = enumerate_stumps(sample);
    const SymDiffClass sym(cls);
    CHECK(sym.size() == cls.size() * cls.size());
    Rng rng(41);
    for (int t = 0; t < 50; ++t) {
        const std::size_t idx = rng.uniform_index(sym.size());
        const auto [i, j] = sym.pair(idx);
        CHECK(idx == i * cls.size() + j);
        for (std::size_t r = 0; r < 3; ++r) {
            const int a = cls.predict(i, sample.row_ptr(r), 1);
            const int b = cls.predict(j, sample.row_ptr(r), 1);
            CHECK(sym.predict(idx, sample.row_ptr(r), 1) == (a != b ? 1 : 0));
        }
    }
}

TEST_CASE("discrepancy equals the balanced-error identity bit for bit") {
    Rng rng(47);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t dim = 1 + rng.uniform_index(2);
        const std::size_t k = 1 + rng.uniform_index(3);
        const Matrix target = random_matrix(2 + rng.uniform_index(9), dim, rng);
        std::vector<Matrix> sources;
        Matrix all = target;
        for (std::size_t i = 0; i < k; ++i) {
            sources.push_back(random_matrix(2 + rng.uniform_index(9), dim, rng, -1.5, 1.5));
            all = vstack(all, sources.back());
        }
        const FiniteHypothesisClass cls = enumerate_stumps(all);

        const DiscErrorIdentityResult id = disc_error_identity(cls, target, sources, trial);

        // Re-evaluate the discrepancy on exactly the rows the identity kept.
        const Matrix kept_target = take_rows(target, id.kept_indices[0]);
        std::vector<Matrix> kept_sources;
        for (std::size_t i = 0; i < k; ++i) {
            kept_sources.push_back(take_rows(sources[i], id.kept_indices[i + 1]));
        }
        const DiscrepancyResult direct =
            multi_discrepancy(SymDiffClass(cls), kept_target, kept_sources);

        CHECK(id.value == direct.value); // exact, both sides integer-counted
        CHECK(id.argmax_index == direct.argmax_index);
        for (double e : id.min_balanced_errors) {
            CHECK(e >= 0.0);
            CHECK(e <= 0.5);
        }
        CHECK(id.value ==
              doctest::Approx(2.0 * (1.0 - 2.0 * id.min_balanced_errors[id.argmax_index]))
                  .epsilon(1e-12));
    }
}

TEST_CASE("concentration terms: frozen values and monotonicity") {
    const ConcTerms t = conc_terms(3, 100, 1, 0.1);
    CHECK(t.risk_term == doctest::Approx(0.22795462189622452753).epsilon(1e-15));
    CHECK(t.disc_term == doctest::Approx(0.55325735303199149476).epsilon(1e-15));

    CHECK(conc_terms(3, 400, 1, 0.1).risk_term < t.risk_term);
    CHECK(conc_terms(6, 100, 1, 0.1).risk_term > t.risk_term);
    CHECK(conc_terms(3, 100, 1, 0.05).disc_term > t.disc_term);
    CHECK(conc_terms(3, 100, 2, 0.1).disc_term > t.disc_term);

    CHECK_THROWS_AS(conc_terms(0, 100, 1, 0.1), InputError);
    CHECK_THROWS_AS(conc_terms(3, 0, 1, 0.1), InputError);
    CHECK_THROWS_AS(conc_terms(3, 100, 0, 0.1), InputError);
    CHECK_THROWS_AS(conc_terms(3, 100, 1, 0.0), InputError);
    CHECK_THROWS_AS(conc_terms(3, 100, 1, 1.0), InputError);
}

TEST_CASE("smooth maximum: frozen value, sandwich, limits") {
    CHECK(lse_max({0.1, 0.9}, 10.0) ==
          doctest::Approx(0.90003354063728957688).epsilon(1e-15));

    Rng rng(51);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> v(1 + rng.uniform_index(5));
        for (double& x : v) x = rng.uniform(-3.0, 3.0);
        const double gamma = std::exp(rng.uniform(-2.0, 6.0));
        const double mx = *std::max_element(v.begin(), v.end());
        const double s = lse_max(v, gamma);
        CHECK(s >= mx - 1e-12);
        CHECK(s <= mx + std::log(double(v.size())) / gamma + 1e-12);
    }

    // Huge gamma reproduces the maximum; huge values do not overflow.
    CHECK(lse_max({-1.0, 2.5, 0.0}, 1e9) == doctest::Approx(2.5));
    CHECK(std::isfinite(lse_max({1e5, 2e5}, 50.0)));
    CHECK_THROWS_AS(lse_max({}, 1.0), InputError);
    CHECK_THROWS_AS(lse_max({1.0}, 0.0), InputError);
}

TEST_CASE("optimal joint risk agrees with an independent double loop") {
    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng.uniform_index(6);
        data::LabeledDomain target{random_matrix(n, 1, rng), random_labels(n, rng), 0};
        std::vector<data::LabeledDomain> sources;
        Matrix all = target.x;
        for (int i = 0; i < 2; ++i) {
            const std::size_t ns = 3 + rng.uniform_index(6);
            sources.push_back({random_matrix(ns, 1, rng), random_labels(ns, rng), i});
            all = vstack(all, sources.back().x);
        }
        const FiniteHypothesisClass cls = enumerate_stumps(all);

        double want = 1e18;
        std::size_t want_idx = 0;
        for (std::size_t h = 0; h < cls.size(); ++h) {
            double worst = 0.0;
            for (const auto& s : sources) {
                worst = std::max(worst, empirical_risk_01(cls.hypotheses[h], s));
            }
            const double joint = empirical_risk_01(cls.hypotheses[h], target) + worst;
            if (joint < want) {
                want = joint;
                want_idx = h;
            }
        }
        const JointRiskResult got = optimal_joint_risk(cls, target, sources);
        CHECK(got.lambda == want);
        CHECK(got.h_index == want_idx);
    }

    data::LabeledDomain unlabeled{Matrix(2, 1), {}, 0};
    const FiniteHypothesisClass cls = enumerate_stumps(Matrix(2, 1, {0.0, 1.0}));
    CHECK_THROWS_AS(optimal_joint_risk(cls, unlabeled, {unlabeled}), ModeError);
}

TEST_CASE("population bound holds for every hypothesis on random instances") {
    Rng rng(71);
    double worst_slack = 1e18;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t dim = 1 + rng.uniform_index(2);
        const std::size_t n = 3 + rng.uniform_index(6);
        data::LabeledDomain target{random_matrix(n, dim, rng), random_labels(n, rng), 0};
        std::vector<data::LabeledDomain> sources;
        Matrix all = target.x;
        const std::size_t k = 1 + rng.uniform_index(3);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t ns = 3 + rng.uniform_index(6);
            sources.push_back(
                {random_matrix(ns, dim, rng, -1.5, 1.5), random_labels(ns, rng), int(i)});
            all = vstack(all, sources.back().x);
        }
        const FiniteHypothesisClass cls = enumerate_stumps(all);
        for (const Hypothesis& h : cls.hypotheses) {
            worst_slack = std::min(worst_slack, verify_population_bound(cls, h, target, sources));
        }
    }
    CHECK(worst_slack >= -1e-12);
}

TEST_CASE("assemble_bound composes its terms") {
    Rng rng(81);
    data::LabeledDomain target{random_matrix(20, 1, rng), random_labels(20, rng), 0};
    std::vector<data::LabeledDomain> sources;
    Matrix all = target.x;
    for (int i = 0; i < 2; ++i) {
        sources.push_back({random_matrix(25, 1, rng), random_labels(25, rng), i});
        all = vstack(all, sources.back().x);
    }
    const FiniteHypothesisClass cls = enumerate_stumps(all);
    const Hypothesis h = cls.hypotheses[3];

    const BoundReport with =
        assemble_bound(cls, h, target.x, sources, std::optional(target), 0.1);
    CHECK(with.lambda_available);
    CHECK(with.k == 2);
    CHECK(with.m == 20);
    CHECK(with.d == cls.vc_dim);
    const ConcTerms ct = conc_terms(2, 20, cls.vc_dim, 0.1);
    CHECK(with.risk_conc_term == ct.risk_term);
    CHECK(with.disc_conc_term == ct.disc_term);
    CHECK(with.total == doctest::Approx(with.worst_source_risk + with.lambda +
                                        0.5 * with.discrepancy_hdh + with.risk_conc_term +
                                        with.disc_conc_term));

    const BoundReport without = assemble_bound(cls, h, target.x, sources, std::nullopt, 0.1);
    CHECK_FALSE(without.lambda_available);
    CHECK(without.total ==
          doctest::Approx(with.total - with.lambda));

    const std::string text = format_bound_report(without);
    CHECK(text.find("lambda = unavailable") != std::string::npos);
    CHECK(text.find("total = ") != std::string::npos);
}

TEST_CASE("empirical deviations stay inside the allowance at the stated rate") {
    // Two-atom domains keep populations exact and trials cheap.
    DiscreteDomainSpec target;
    target.support = Matrix(2, 1, {0.0, 1.0});
    target.probs = {0.5, 0.5};
    target.labels = {0, 1};
    DiscreteDomainSpec src = target;
    src.probs = {0.7, 0.3};

    const FiniteHypothesisClass cls = enumerate_stumps(target.support);
    const ConcentrationResult disc =
        concentration_mc_discrepancy(target, {src, target}, cls, 32, cls.vc_dim, 0.1, 400, 5);
    CHECK(disc.trials == 400);
    CHECK(disc.violation_rate <= 0.1);

    const ConcentrationResult risk =
        concentration_mc_source_risk({src, target}, cls, 32, cls.vc_dim, 0.1, 400, 6);
    CHECK(risk.violation_rate <= 0.1);
    CHECK(risk.epsilon > 0.0);

    DiscreteDomainSpec bad = target;
    bad.probs = {0.9, 0.3};
    CHECK_THROWS_AS(bad.validate(), InputError);
}
