#include "msda/mdan/train.hpp"

#include <algorithm>
#include <cmath>

#include "msda/data/sampler.hpp"
#include "msda/error.hpp"
#include "msda/theory/lse.hpp"

namespace msda::mdan {

namespace {

Matrix add_scaled(const Matrix& a, double sa, const Matrix& b, double sb) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("gradient blocks have mismatched shape");
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = sa * a.data()[i] + sb * b.data()[i];
    }
    return out;
}

Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t count) {
    Matrix out(count, m.cols());
    for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(r, c) = m(begin + r, c);
        }
    }
    return out;
}

std::size_t argmax_lowest(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
        }
    }
    return best;
}

std::uint64_t step_dropout_seed(const TrainConfig& config, const OptStates& states) {
    return Rng::derive(config.seed,
                       0xd70ULL + static_cast<std::uint64_t>(states.extractor.step));
}

} // namespace

StepGradients assemble_gradients(const MdanModel& model, const ScoreBundle& bundle,
                                 const std::vector<double>& weights, double mu) {
    StepGradients g;
    g.extractor = nn::Gradients::zeros_like(model.extractor);
    g.task_head = nn::Gradients::zeros_like(model.task_head);
    g.discriminators.reserve(model.discriminators.size());

    const std::size_t m = bundle.ext_target.input.rows();
    Matrix target_feat_grad(m, model.feature_dim());

    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double w = weights[i];
        if (w == 0.0) {
            g.discriminators.push_back(nn::Gradients::zeros_like(model.discriminators[i]));
            continue;
        }
        Matrix task_feat_grad;
        const nn::Gradients head_g = nn::backward(model.task_head, bundle.head[i],
                                                  bundle.task_grads[i].grad, &task_feat_grad);
        g.task_head.add_scaled(head_g, w);

        Matrix disc_feat_grad;
        nn::Gradients disc_g = nn::backward(model.discriminators[i], bundle.disc[i],
                                            bundle.domain_grads[i].grad, &disc_feat_grad);
        disc_g.scale(w);
        g.discriminators.push_back(std::move(disc_g));

        const Matrix src_part = slice_rows(disc_feat_grad, 0, m);
        const Matrix tgt_part = slice_rows(disc_feat_grad, m, m);

        // Source rows: task pull plus reversed domain push, one backward.
        const Matrix src_grad = add_scaled(task_feat_grad, w, nn::grad_reverse(src_part, mu), w);
        g.extractor.add_scaled(nn::backward(model.extractor, bundle.ext_source[i], src_grad),
                               1.0);
        // Target rows share one cache; accumulate and run backward once.
        target_feat_grad = add_scaled(target_feat_grad, 1.0,
                                      nn::grad_reverse(tgt_part, mu), w);
    }
    g.extractor.add_scaled(nn::backward(model.extractor, bundle.ext_target, target_feat_grad),
                           1.0);
    return g;
}

ScoreBundle domain_scores(const MdanModel& model, const std::vector<Batch>& source_batches,
                          const Batch& target_batch, double dropout,
                          std::uint64_t dropout_seed) {
    model.check_shapes();
    if (source_batches.size() != static_cast<std::size_t>(model.k)) {
        throw InputError("batch count does not match the model's source count");
    }
    if (target_batch.labels.has_value()) {
        throw InputError("target batch must be unlabeled");
    }
    const std::size_t m = target_batch.features.rows();
    if (m == 0) {
        throw InputError("empty target batch");
    }
    for (const Batch& b : source_batches) {
        if (b.features.rows() != m) {
            throw InputError("source batch size does not match target batch size");
        }
        if (!b.labels.has_value() || b.labels->size() != m) {
            throw InputError("source batches must carry one label per row");
        }
    }

    ScoreBundle out;
    out.ext_target = nn::forward(model.extractor, target_batch.features, dropout,
                                 Rng::derive(dropout_seed, 0));
    std::vector<int> domain_labels(2 * m, 0);
    std::fill(domain_labels.begin(), domain_labels.begin() + m, 1);

    for (std::size_t i = 0; i < source_batches.size(); ++i) {
        out.ext_source.push_back(nn::forward(model.extractor, source_batches[i].features,
                                             dropout, Rng::derive(dropout_seed, 3 * i + 1)));
        out.head.push_back(nn::forward(model.task_head, out.ext_source[i].output(), dropout,
                                       Rng::derive(dropout_seed, 3 * i + 2)));
        out.task_grads.push_back(nn::loss(out.head[i].output(), *source_batches[i].labels,
                                          nn::LossKind::SoftmaxXent));
        out.task_losses.push_back(out.task_grads[i].value);

        const Matrix stacked = vstack(out.ext_source[i].output(), out.ext_target.output());
        out.disc.push_back(nn::forward(model.discriminators[i], stacked, dropout,
                                       Rng::derive(dropout_seed, 3 * i + 3)));
        out.domain_grads.push_back(nn::loss(out.disc[i].output(), domain_labels,
                                            nn::LossKind::SoftmaxXent));
        out.domain_losses.push_back(out.domain_grads[i].value);
        out.scores.push_back(out.task_losses[i] - out.domain_losses[i]);
    }
    return out;
}

std::vector<double> soft_weights(const std::vector<double>& eps, double gamma) {
    if (eps.empty()) {
        throw InputError("weights over an empty score list");
    }
    if (!(gamma > 0.0)) {
        throw InputError("smoothing parameter must be positive");
    }
    const double vmax = *std::max_element(eps.begin(), eps.end());
    std::vector<double> w(eps.size());
    double total = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        w[i] = std::exp(gamma * (eps[i] - vmax));
        total += w[i];
    }
    for (double& v : w) {
        v /= total;
    }
    return w;
}

OptStates OptStates::init(const MdanModel& model, const nn::AdamConfig& config) {
    OptStates s{nn::AdamState::init(model.extractor, config),
                nn::AdamState::init(model.task_head, config),
                {}};
    s.discriminators.reserve(model.discriminators.size());
    for (const nn::Mlp& d : model.discriminators) {
        s.discriminators.push_back(nn::AdamState::init(d, config));
    }
    return s;
}

StepTrace step_hard(MdanModel& model, const std::vector<Batch>& source_batches,
                    const Batch& target_batch, const TrainConfig& config, OptStates& states) {
    if (config.mode != Mode::Hard) {
        throw ModeError("hard step invoked with a soft-mode config");
    }
    config.validate();
    const ScoreBundle bundle = domain_scores(model, source_batches, target_batch,
                                             config.dropout,
                                             step_dropout_seed(config, states));
    StepTrace trace;
    trace.step = static_cast<int>(states.extractor.step);
    trace.task_losses = bundle.task_losses;
    trace.domain_losses = bundle.domain_losses;
    trace.scores = bundle.scores;
    trace.chosen = argmax_lowest(bundle.scores);
    trace.weights.assign(bundle.scores.size(), 0.0);
    trace.weights[trace.chosen] = 1.0;
    trace.objective = bundle.scores[trace.chosen];

    const StepGradients g = assemble_gradients(model, bundle, trace.weights, config.mu);
    nn::opt_step(model.extractor, g.extractor, states.extractor);
    nn::opt_step(model.task_head, g.task_head, states.task_head);
    nn::opt_step(model.discriminators[trace.chosen], g.discriminators[trace.chosen],
                 states.discriminators[trace.chosen]);
    return trace;
}

StepTrace step_soft(MdanModel& model, const std::vector<Batch>& source_batches,
                    const Batch& target_batch, const TrainConfig& config, OptStates& states) {
    if (config.mode != Mode::Soft) {
        throw ModeError("soft step invoked with a hard-mode config");
    }
    config.validate();
    const ScoreBundle bundle = domain_scores(model, source_batches, target_batch,
                                             config.dropout,
                                             step_dropout_seed(config, states));
    StepTrace trace;
    trace.step = static_cast<int>(states.extractor.step);
    trace.task_losses = bundle.task_losses;
    trace.domain_losses = bundle.domain_losses;
    trace.scores = bundle.scores;
    trace.chosen = argmax_lowest(bundle.scores);
    trace.weights = soft_weights(bundle.scores, config.gamma);
    trace.objective = theory::lse_max(bundle.scores, config.gamma);

    const StepGradients g = assemble_gradients(model, bundle, trace.weights, config.mu);
    nn::opt_step(model.extractor, g.extractor, states.extractor);
    nn::opt_step(model.task_head, g.task_head, states.task_head);
    for (std::size_t i = 0; i < model.discriminators.size(); ++i) {
        nn::opt_step(model.discriminators[i], g.discriminators[i], states.discriminators[i]);
    }
    return trace;
}

TrainResult train(MdanModel& model, const std::vector<data::LabeledDomain>& sources,
                  const data::UnlabeledDomain& target, const TrainConfig& config) {
    config.validate();
    model.check_shapes();
    if (sources.size() != static_cast<std::size_t>(model.k)) {
        throw InputError("source count does not match the model");
    }
    std::size_t largest = 0;
    for (const data::LabeledDomain& s : sources) {
        if (s.size() == 0) {
            throw InputError("empty source domain");
        }
        if (s.dim() != model.extractor.in_dim()) {
            throw InputError("source dimension does not match the model input");
        }
        largest = std::max(largest, s.size());
    }
    if (target.size() == 0) {
        throw InputError("empty target domain");
    }
    if (target.dim() != model.extractor.in_dim()) {
        throw InputError("target dimension does not match the model input");
    }

    TrainResult result;
    if (config.epochs == 0) {
        return result;
    }
    const auto m = static_cast<std::size_t>(config.batch_size);
    const std::size_t steps_per_epoch = (largest + m - 1) / m;
    data::MinibatchIterator batches(sources, target, m, Rng::derive(config.seed, 1));

    nn::AdamConfig opt;
    opt.learning_rate = config.learning_rate;
    OptStates states = OptStates::init(model, opt);

    for (int e = 0; e < config.epochs; ++e) {
        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            const data::BatchTuple tuple = batches.next();
            result.history.push_back(config.mode == Mode::Hard
                                         ? step_hard(model, tuple.sources, tuple.target,
                                                     config, states)
                                         : step_soft(model, tuple.sources, tuple.target,
                                                     config, states));
        }
    }
    return result;
}

Metric metric_from_string(const std::string& s) {
    if (s == "accuracy") return Metric::Accuracy;
    if (s == "mae") return Metric::Mae;
    throw InputError("unknown metric '" + s + "' (expected accuracy or mae)");
}

Matrix predict_scores(const MdanModel& model, const Matrix& x) {
    if (x.cols() != model.extractor.in_dim()) {
        throw InputError("feature dimension does not match the model input");
    }
    const nn::ForwardCache feat = nn::forward(model.extractor, x);
    return nn::forward(model.task_head, feat.output()).output();
}

std::vector<int> predict(const MdanModel& model, const Matrix& x) {
    const Matrix scores = predict_scores(model, x);
    std::vector<int> labels(scores.rows());
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.cols(); ++c) {
            if (scores(r, c) > scores(r, best)) {
                best = c;
            }
        }
        labels[r] = static_cast<int>(best);
    }
    return labels;
}

double evaluate(const MdanModel& model, const data::LabeledDomain& dom, Metric metric) {
    if (dom.size() == 0) {
        throw InputError("evaluation over an empty domain");
    }
    if (dom.y.size() != dom.size()) {
        throw InputError("label count does not match feature rows");
    }
    const std::vector<int> pred = predict(model, dom.x);
    if (metric == Metric::Accuracy) {
        for (int y : dom.y) {
            if (y < 0 || y >= model.num_classes) {
                throw InputError("label outside the model's class range");
            }
        }
        std::size_t hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (pred[i] == dom.y[i]) {
                ++hits;
            }
        }
        return static_cast<double>(hits) / static_cast<double>(pred.size());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        total += std::abs(static_cast<double>(pred[i]) - static_cast<double>(dom.y[i]));
    }
    return total / static_cast<double>(pred.size());
}

} // namespace msda::mdan
