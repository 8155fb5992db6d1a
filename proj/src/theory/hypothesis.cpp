#include "msda/theory/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "msda/error.hpp"

namespace msda::theory {

Hypothesis Hypothesis::constant(int label) {
    if (label != 0 && label != 1) {
        throw InputError("constant hypothesis label must be 0 or 1");
    }
    Hypothesis h;
    h.kind = Kind::Constant;
    h.constant_label = label;
    return h;
}

Hypothesis Hypothesis::stump(std::size_t feature, double threshold, int polarity) {
    if (polarity != 1 && polarity != -1) {
        throw InputError("stump polarity must be +1 or -1");
    }
    Hypothesis h;
    h.kind = Kind::Stump;
    h.feature = feature;
    h.threshold = threshold;
    h.polarity = polarity;
    return h;
}

int Hypothesis::predict(const double* x, std::size_t dim) const {
    if (kind == Kind::Constant) {
        return constant_label;
    }
    if (feature >= dim) {
        throw InputError("stump feature index out of range");
    }
    const bool ge = x[feature] >= threshold;
    return (polarity > 0) == ge ? 1 : 0;
}

Hypothesis Hypothesis::complement() const {
    Hypothesis h = *this;
    if (kind == Kind::Constant) {
        h.constant_label = 1 - constant_label;
    } else {
        h.polarity = -polarity;
    }
    return h;
}

int FiniteHypothesisClass::predict(std::size_t h, const double* x, std::size_t dim) const {
    return hypotheses[h].predict(x, dim);
}

std::vector<std::vector<std::uint8_t>> FiniteHypothesisClass::behaviors(const Matrix& x) const {
    std::vector<std::vector<std::uint8_t>> out(hypotheses.size());
    for (std::size_t h = 0; h < hypotheses.size(); ++h) {
        out[h].resize(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            out[h][r] = static_cast<std::uint8_t>(hypotheses[h].predict(x.row_ptr(r), x.cols()));
        }
    }
    return out;
}

bool FiniteHypothesisClass::complement_closed_on(const Matrix& reference) const {
    auto beh = behaviors(reference);
    std::map<std::vector<std::uint8_t>, bool> seen;
    for (const auto& b : beh) {
        seen[b] = true;
    }
    for (const auto& b : beh) {
        std::vector<std::uint8_t> flipped(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            flipped[i] = static_cast<std::uint8_t>(1 - b[i]);
        }
        if (!seen.count(flipped)) {
            return false;
        }
    }
    return true;
}

SymDiffClass::SymDiffClass(FiniteHypothesisClass base) : base_(std::move(base)) {
    if (base_.size() == 0) {
        throw InputError("symmetric difference over an empty class");
    }
}

std::pair<std::size_t, std::size_t> SymDiffClass::pair(std::size_t idx) const {
    const std::size_t n = base_.size();
    if (idx >= n * n) {
        throw InputError("symmetric difference index out of range");
    }
    return {idx / n, idx % n};
}

int SymDiffClass::predict(std::size_t idx, const double* x, std::size_t dim) const {
    auto [i, j] = pair(idx);
    return base_.predict(i, x, dim) ^ base_.predict(j, x, dim);
}

FiniteHypothesisClass enumerate_stumps(const Matrix& sample) {
    if (sample.rows() == 0 || sample.cols() == 0) {
        throw InputError("stump enumeration needs a non-empty sample");
    }
    const std::size_t dim = sample.cols();
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<Hypothesis> raw;
    raw.push_back(Hypothesis::constant(0));
    raw.push_back(Hypothesis::constant(1));
    for (std::size_t f = 0; f < dim; ++f) {
        std::vector<double> values(sample.rows());
        for (std::size_t r = 0; r < sample.rows(); ++r) {
            values[r] = sample(r, f);
        }
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());

        std::vector<double> thresholds;
        thresholds.push_back(-inf);
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            thresholds.push_back(0.5 * (values[i] + values[i + 1]));
        }
        thresholds.push_back(inf);
        for (double t : thresholds) {
            raw.push_back(Hypothesis::stump(f, t, +1));
            raw.push_back(Hypothesis::stump(f, t, -1));
        }
    }

    FiniteHypothesisClass out;
    std::map<std::vector<std::uint8_t>, bool> seen;
    for (const Hypothesis& h : raw) {
        std::vector<std::uint8_t> beh(sample.rows());
        for (std::size_t r = 0; r < sample.rows(); ++r) {
            beh[r] = static_cast<std::uint8_t>(h.predict(sample.row_ptr(r), dim));
        }
        if (!seen.count(beh)) {
            seen[beh] = true;
            out.hypotheses.push_back(h);
        }
    }
    out.vc_dim = dim == 1 ? 2 : static_cast<int>(std::floor(std::log2(static_cast<double>(dim)))) + 2;
    return out;
}

double empirical_risk_01(const Hypothesis& h, const data::LabeledDomain& dom) {
    if (dom.x.rows() == 0) {
        throw InputError("empirical risk over an empty domain");
    }
    if (dom.y.size() != dom.x.rows()) {
        throw ShapeError("label count does not match feature rows");
    }
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < dom.x.rows(); ++r) {
        if (h.predict(dom.x.row_ptr(r), dom.x.cols()) != dom.y[r]) {
            ++wrong;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(dom.x.rows());
}

} // namespace msda::theory
