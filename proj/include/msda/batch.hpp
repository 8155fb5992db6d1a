#pragma once

#include <optional>
#include <vector>

#include "msda/matrix.hpp"

namespace msda {

// One minibatch: m feature rows, optional labels, and the id of the domain
// it was drawn from.
struct Batch {
    Matrix features;                     // m x dim
    std::optional<std::vector<int>> labels;
    int domain = 0;

    std::size_t size() const { return features.rows(); }
};

} // namespace msda
