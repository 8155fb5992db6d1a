#include "msda/eval/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msda/error.hpp"

namespace msda::eval {

namespace {

// Average ranks over ties of the absolute differences, 1-based.
std::vector<double> tied_ranks(const std::vector<double>& abs_d) {
    const std::size_t n = abs_d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            ranks[order[t]] = avg;
        }
        i = j + 1;
    }
    return ranks;
}

} // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw InputError("paired samples must have equal length");
    }
    if (a.empty()) {
        throw InputError("paired test needs at least one pair");
    }
    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) {
            diff.push_back(d);
        }
    }
    WilcoxonResult out;
    out.n_effective = static_cast<int>(diff.size());
    if (diff.empty()) {
        return out; // no evidence either way
    }

    std::vector<double> abs_d(diff.size());
    std::transform(diff.begin(), diff.end(), abs_d.begin(),
                   [](double d) { return std::abs(d); });
    const std::vector<double> ranks = tied_ranks(abs_d);

    double wplus = 0.0, total = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        total += ranks[i];
        sum_sq += ranks[i] * ranks[i];
        if (diff[i] > 0.0) {
            wplus += ranks[i];
        }
    }
    const double wminus = total - wplus;
    out.statistic = std::min(wplus, wminus);

    const double mean = 0.5 * total;
    const double dev = std::abs(wplus - mean);
    const std::size_t n = diff.size();

    if (n <= 12) {
        // Exact conditional null: every sign assignment equally likely.
        const std::size_t combos = std::size_t{1} << n;
        std::size_t extreme = 0;
        for (std::size_t mask = 0; mask < combos; ++mask) {
            double t = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (std::size_t{1} << i)) {
                    t += ranks[i];
                }
            }
            if (std::abs(t - mean) >= dev - 1e-9) {
                ++extreme;
            }
        }
        out.p_two_sided = static_cast<double>(extreme) / static_cast<double>(combos);
    } else {
        const double sigma = std::sqrt(sum_sq / 4.0);
        const double z = std::max(0.0, dev - 0.5) / sigma;
        out.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
    return out;
}

} // namespace msda::eval
