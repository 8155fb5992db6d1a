#pragma once

#include <cstdint>
#include <vector>

#include "msda/matrix.hpp"

namespace msda::eval {

struct PadConfig {
    double learning_rate = 0.05;
    int epochs = 300;
    std::uint64_t seed = 0;
};

// Proxy A-distance: fit a linear logistic probe to tell the two samples
// apart on a 50/50 split per domain, then map the balanced held-out error
// through 2 * (1 - 2 * err), clamped to [0, 2].
double pad(const Matrix& source, const Matrix& target, const PadConfig& config = {});

// Source order by ascending value, ties by index.
std::vector<std::size_t> rank_sources(const std::vector<double>& pads);

struct PadReport {
    std::vector<double> pads;            // one per source
    std::vector<std::size_t> ranking;    // source indices, ascending pad
};

PadReport pad_report(const std::vector<Matrix>& sources, const Matrix& target,
                     const PadConfig& config = {});

} // namespace msda::eval
