#include "msda/theory/divergence.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

#include "msda/error.hpp"
#include "msda/rng.hpp"

namespace msda::theory {

namespace {

// One bit row per hypothesis; bit r is the prediction on sample row r.
struct BitTable {
    std::size_t points = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    const std::uint64_t* row(std::size_t h) const { return bits.data() + h * words; }
};

BitTable pack_behaviors(const FiniteHypothesisClass& cls, const Matrix& x) {
    BitTable t;
    t.points = x.rows();
    t.words = (x.rows() + 63) / 64;
    t.bits.assign(cls.size() * t.words, 0);
    for (std::size_t h = 0; h < cls.size(); ++h) {
        std::uint64_t* row = t.bits.data() + h * t.words;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            if (cls.predict(h, x.row_ptr(r), x.cols())) {
                row[r / 64] |= std::uint64_t{1} << (r % 64);
            }
        }
    }
    return t;
}

std::int64_t xor_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    std::int64_t n = 0;
    for (std::size_t w = 0; w < words; ++w) {
        n += std::popcount(a[w] ^ b[w]);
    }
    return n;
}

void check_sample(const Matrix& x, const char* name) {
    if (x.rows() == 0) {
        throw InputError(std::string(name) + " sample is empty");
    }
}

// max over hypotheses of |cA * nB - cB * nA| where c are predicted-1 counts.
std::int64_t max_count_gap(const FiniteHypothesisClass& cls, const Matrix& a, const Matrix& b) {
    const auto nA = static_cast<std::int64_t>(a.rows());
    const auto nB = static_cast<std::int64_t>(b.rows());
    std::int64_t best = 0;
    for (const Hypothesis& h : cls.hypotheses) {
        std::int64_t cA = 0, cB = 0;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            cA += h.predict(a.row_ptr(r), a.cols());
        }
        for (std::size_t r = 0; r < b.rows(); ++r) {
            cB += h.predict(b.row_ptr(r), b.cols());
        }
        best = std::max(best, std::abs(cA * nB - cB * nA));
    }
    return best;
}

std::int64_t max_count_gap(const SymDiffClass& cls, const BitTable& ta, const BitTable& tb) {
    const auto nA = static_cast<std::int64_t>(ta.points);
    const auto nB = static_cast<std::int64_t>(tb.points);
    const std::size_t n = cls.base().size();
    std::int64_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::int64_t cA = xor_popcount(ta.row(i), ta.row(j), ta.words);
            const std::int64_t cB = xor_popcount(tb.row(i), tb.row(j), tb.words);
            best = std::max(best, std::abs(cA * nB - cB * nA));
        }
    }
    return best;
}

double gap_to_divergence(std::int64_t gap, std::size_t nA, std::size_t nB) {
    return 2.0 * static_cast<double>(gap) /
           (static_cast<double>(nA) * static_cast<double>(nB));
}

} // namespace

double h_divergence(const FiniteHypothesisClass& cls, const Matrix& a, const Matrix& b) {
    check_sample(a, "first");
    check_sample(b, "second");
    if (a.cols() != b.cols()) {
        throw InputError("divergence samples have mismatched dimension");
    }
    if (cls.size() == 0) {
        throw InputError("divergence over an empty hypothesis class");
    }
    return gap_to_divergence(max_count_gap(cls, a, b), a.rows(), b.rows());
}

double h_divergence(const SymDiffClass& cls, const Matrix& a, const Matrix& b) {
    check_sample(a, "first");
    check_sample(b, "second");
    if (a.cols() != b.cols()) {
        throw InputError("divergence samples have mismatched dimension");
    }
    const BitTable ta = pack_behaviors(cls.base(), a);
    const BitTable tb = pack_behaviors(cls.base(), b);
    return gap_to_divergence(max_count_gap(cls, ta, tb), a.rows(), b.rows());
}

DiscrepancyResult multi_discrepancy(const FiniteHypothesisClass& cls, const Matrix& target,
                                    const std::vector<Matrix>& sources) {
    if (sources.empty()) {
        throw InputError("discrepancy needs at least one source");
    }
    DiscrepancyResult out;
    out.value = -1.0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const double v = h_divergence(cls, target, sources[i]);
        if (v > out.value) {
            out.value = v;
            out.argmax_index = i;
        }
    }
    return out;
}

DiscrepancyResult multi_discrepancy(const SymDiffClass& cls, const Matrix& target,
                                    const std::vector<Matrix>& sources) {
    if (sources.empty()) {
        throw InputError("discrepancy needs at least one source");
    }
    check_sample(target, "target");
    const BitTable tt = pack_behaviors(cls.base(), target);
    DiscrepancyResult out;
    out.value = -1.0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        check_sample(sources[i], "source");
        if (sources[i].cols() != target.cols()) {
            throw InputError("discrepancy samples have mismatched dimension");
        }
        const BitTable ts = pack_behaviors(cls.base(), sources[i]);
        const std::int64_t gap = max_count_gap(cls, tt, ts);
        const double v = gap_to_divergence(gap, target.rows(), sources[i].rows());
        if (v > out.value) {
            out.value = v;
            out.argmax_index = i;
        }
    }
    return out;
}

DiscErrorIdentityResult disc_error_identity(const FiniteHypothesisClass& cls,
                                            const Matrix& target,
                                            const std::vector<Matrix>& sources,
                                            std::uint64_t seed) {
    if (sources.empty()) {
        throw InputError("identity needs at least one source");
    }
    check_sample(target, "target");
    std::size_t m = target.rows();
    for (const Matrix& s : sources) {
        check_sample(s, "source");
        if (s.cols() != target.cols()) {
            throw InputError("identity samples have mismatched dimension");
        }
        m = std::min(m, s.rows());
    }

    auto trim = [&](const Matrix& x, std::uint64_t slot) {
        std::vector<std::size_t> idx(x.rows());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        if (x.rows() > m) {
            Rng rng(Rng::derive(seed, slot));
            rng.shuffle(idx);
            idx.resize(m);
            std::sort(idx.begin(), idx.end());
        }
        return idx;
    };

    DiscErrorIdentityResult out;
    out.kept_indices.push_back(trim(target, 0));
    const Matrix t_sub = take_rows(target, out.kept_indices[0]);
    if (t_sub.rows() != m) {
        throw InputError("subsampled target size mismatch");
    }
    if (!cls.complement_closed_on(t_sub)) {
        throw InputError("hypothesis class is not complement-closed");
    }

    const BitTable tt = pack_behaviors(cls, t_sub);
    const std::size_t n = cls.size();
    const auto mi = static_cast<std::int64_t>(m);

    std::int64_t best_gap = -1;
    for (std::size_t si = 0; si < sources.size(); ++si) {
        out.kept_indices.push_back(trim(sources[si], si + 1));
        const Matrix s_sub = take_rows(sources[si], out.kept_indices.back());
        if (s_sub.rows() != m) {
            throw InputError("subsampled source size mismatch");
        }
        const BitTable ts = pack_behaviors(cls, s_sub);

        // Balanced error at labeling source points 1 and target points 0,
        // scaled by 2m so it stays an integer: 2m * err = m - cS + cT.
        std::int64_t min_err2m = 2 * mi;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::int64_t cT = xor_popcount(tt.row(i), tt.row(j), tt.words);
                const std::int64_t cS = xor_popcount(ts.row(i), ts.row(j), ts.words);
                min_err2m = std::min(min_err2m, mi - cS + cT);
            }
        }
        out.min_balanced_errors.push_back(static_cast<double>(min_err2m) /
                                          (2.0 * static_cast<double>(m)));
        // 2 * (1 - 2 * err_min) over a complement-closed class equals the
        // divergence; evaluate through the same integer gap so the match
        // with multi_discrepancy is bit-exact.
        const std::int64_t gap = (mi - min_err2m) * mi;
        if (gap > best_gap) {
            best_gap = gap;
            out.argmax_index = si;
        }
    }
    out.value = gap_to_divergence(best_gap, m, m);
    return out;
}

} // namespace msda::theory
