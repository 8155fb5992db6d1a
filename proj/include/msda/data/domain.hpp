#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msda/matrix.hpp"

namespace msda::data {

// Finite labeled sample from one domain.
struct LabeledDomain {
    Matrix x;                 // n x dim
    std::vector<int> y;       // n binary/multiclass labels
    int id = 0;

    std::size_t size() const { return x.rows(); }
    std::size_t dim() const { return x.cols(); }
};

// Finite unlabeled sample. Labels may exist (synthetic targets keep them for
// evaluation) but they are reachable only through oracle_labels(); training
// code takes UnlabeledDomain and must not call it.
class UnlabeledDomain {
public:
    UnlabeledDomain() = default;
    UnlabeledDomain(Matrix x, int id) : x_(std::move(x)), id_(id) {}
    UnlabeledDomain(Matrix x, int id, std::vector<int> oracle)
        : x_(std::move(x)), id_(id), oracle_(std::move(oracle)) {}

    const Matrix& x() const { return x_; }
    int id() const { return id_; }
    std::size_t size() const { return x_.rows(); }
    std::size_t dim() const { return x_.cols(); }

    bool has_oracle_labels() const { return oracle_.has_value(); }
    // Evaluation-only accessor. Returns nullptr when no labels were retained.
    const std::vector<int>* oracle_labels() const { return oracle_ ? &*oracle_ : nullptr; }

    // View of this domain with labels exposed, for bound/risk oracles.
    LabeledDomain as_labeled_oracle() const;

private:
    Matrix x_;
    int id_ = 0;
    std::optional<std::vector<int>> oracle_;
};

} // namespace msda::data
