#include "msda/eval/pad.hpp"

#include <algorithm>
#include <numeric>

#include "msda/error.hpp"
#include "msda/nn/adam.hpp"
#include "msda/nn/mlp.hpp"
#include "msda/rng.hpp"

namespace msda::eval {

namespace {

struct Split {
    Matrix train;
    Matrix held;
};

Split split_half(const Matrix& x, Rng& rng) {
    std::vector<std::size_t> idx(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    const std::size_t half = x.rows() / 2;
    Split s;
    s.train = take_rows(x, {idx.begin(), idx.begin() + half});
    s.held = take_rows(x, {idx.begin() + half, idx.end()});
    return s;
}

double held_out_error(const nn::Mlp& probe, const Matrix& x, int truth) {
    const Matrix logits = nn::forward(probe, x).output();
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const int pred = logits(r, 1) > logits(r, 0) ? 1 : 0;
        if (pred != truth) {
            ++wrong;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(logits.rows());
}

} // namespace

double pad(const Matrix& source, const Matrix& target, const PadConfig& config) {
    if (source.rows() < 2 || target.rows() < 2) {
        throw InputError("each domain needs at least two points for a split");
    }
    if (source.cols() != target.cols()) {
        throw ShapeError("domains have mismatched dimension");
    }
    Rng rng(Rng::derive(config.seed, 0xbadULL));
    const Split s = split_half(source, rng);
    const Split t = split_half(target, rng);

    // Probe sees source rows as class 1 and target rows as class 0.
    const Matrix train_x = vstack(s.train, t.train);
    std::vector<int> train_y(train_x.rows(), 0);
    std::fill(train_y.begin(), train_y.begin() + s.train.rows(), 1);

    nn::Mlp probe = nn::make_mlp(source.cols(), {}, 2, nn::Activation::Identity, rng);
    nn::AdamConfig opt;
    opt.learning_rate = config.learning_rate;
    nn::AdamState state = nn::AdamState::init(probe, opt);
    for (int e = 0; e < config.epochs; ++e) {
        const nn::ForwardCache cache = nn::forward(probe, train_x);
        const nn::LossResult l = nn::loss(cache.output(), train_y, nn::LossKind::SoftmaxXent);
        nn::opt_step(probe, nn::backward(probe, cache, l.grad), state);
    }

    const double err = 0.5 * (held_out_error(probe, s.held, 1) + held_out_error(probe, t.held, 0));
    return std::clamp(2.0 * (1.0 - 2.0 * err), 0.0, 2.0);
}

std::vector<std::size_t> rank_sources(const std::vector<double>& pads) {
    std::vector<std::size_t> order(pads.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pads[a] < pads[b]; });
    return order;
}

PadReport pad_report(const std::vector<Matrix>& sources, const Matrix& target,
                     const PadConfig& config) {
    if (sources.empty()) {
        throw InputError("report needs at least one source");
    }
    PadReport report;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        PadConfig per = config;
        per.seed = Rng::derive(config.seed, i);
        report.pads.push_back(pad(sources[i], target, per));
    }
    report.ranking = rank_sources(report.pads);
    return report;
}

} // namespace msda::eval
