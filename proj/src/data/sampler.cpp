#include "msda/data/sampler.hpp"

#include <numeric>

#include "msda/error.hpp"

namespace msda::data {

MinibatchIterator::MinibatchIterator(const std::vector<LabeledDomain>& sources,
                                     const UnlabeledDomain& target, std::size_t m,
                                     std::uint64_t seed)
    : sources_(&sources), target_(&target), m_(m), rng_(Rng::derive(seed, 0xb41c5ULL)) {
    if (m_ < 1) throw InputError("minibatch size must be >= 1");
    if (sources.empty()) throw InputError("minibatch iterator needs at least one source");
    const std::size_t k = sources.size();
    order_.resize(k + 1);
    cursor_.assign(k + 1, 0);
    for (std::size_t s = 0; s <= k; ++s) {
        const std::size_t n = s < k ? sources[s].size() : target.size();
        if (n == 0) throw InputError("empty domain in minibatch iterator");
        order_[s].resize(n);
        std::iota(order_[s].begin(), order_[s].end(), std::size_t{0});
        rng_.shuffle(order_[s]);
    }
}

std::vector<std::size_t> MinibatchIterator::draw(std::size_t slot, std::size_t n) {
    auto& order = order_[slot];
    auto& cur = cursor_[slot];
    std::vector<std::size_t> idx;
    idx.reserve(m_);
    while (idx.size() < m_ && cur < order.size()) idx.push_back(order[cur++]);
    if (idx.size() < m_) {
        // Domain exhausted mid-batch: fill with replacement, then reshuffle.
        while (idx.size() < m_) idx.push_back(rng_.uniform_index(n));
        rng_.shuffle(order);
        cur = 0;
    }
    return idx;
}

BatchTuple MinibatchIterator::next() {
    const std::size_t k = sources_->size();
    last_indices_.assign(k + 1, {});
    BatchTuple out;
    out.sources.reserve(k);
    for (std::size_t s = 0; s < k; ++s) {
        const auto& dom = (*sources_)[s];
        auto idx = draw(s, dom.size());
        Batch b;
        b.features = take_rows(dom.x, idx);
        std::vector<int> labels(m_);
        for (std::size_t i = 0; i < m_; ++i) labels[i] = dom.y[idx[i]];
        b.labels = std::move(labels);
        b.domain = dom.id;
        last_indices_[s] = std::move(idx);
        out.sources.push_back(std::move(b));
    }
    auto idx = draw(k, target_->size());
    out.target.features = take_rows(target_->x(), idx);
    out.target.domain = target_->id();
    last_indices_[k] = std::move(idx);
    return out;
}

} // namespace msda::data
