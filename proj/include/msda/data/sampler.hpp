#pragma once

#include <cstdint>
#include <vector>

#include "msda/batch.hpp"
#include "msda/data/domain.hpp"
#include "msda/rng.hpp"

namespace msda::data {

struct BatchTuple {
    std::vector<Batch> sources; // k batches, m rows each, labeled
    Batch target;               // m rows, unlabeled
};

// Equal-size minibatch stream: every tuple carries exactly m rows per source
// and m target rows. Rows come from a per-domain seeded shuffle; when a
// domain runs out mid-batch the shortfall is drawn with replacement and a
// fresh shuffle starts on the next batch. Deterministic per seed.
class MinibatchIterator {
public:
    MinibatchIterator(const std::vector<LabeledDomain>& sources, const UnlabeledDomain& target,
                      std::size_t m, std::uint64_t seed);

    BatchTuple next();

    // Index trace of the most recent batch, per domain (k source rows then
    // target); exposed so schedules can be recorded and frozen.
    const std::vector<std::vector<std::size_t>>& last_indices() const { return last_indices_; }

private:
    std::vector<std::size_t> draw(std::size_t domain_slot, std::size_t n);

    const std::vector<LabeledDomain>* sources_;
    const UnlabeledDomain* target_;
    std::size_t m_;
    Rng rng_;
    std::vector<std::vector<std::size_t>> order_;   // shuffled index queues, one per domain
    std::vector<std::size_t> cursor_;
    std::vector<std::vector<std::size_t>> last_indices_;
};

} // namespace msda::data
