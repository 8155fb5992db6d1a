#pragma once

#include <cstdint>
#include <vector>

#include "msda/batch.hpp"
#include "msda/data/domain.hpp"
#include "msda/mdan/model.hpp"
#include "msda/nn/adam.hpp"

namespace msda::mdan {

// Losses and forward caches for one batch tuple. Scores follow
// score_i = task loss on source i minus discriminator i's loss on the
// balanced source-vs-target stack.
struct ScoreBundle {
    std::vector<double> task_losses;
    std::vector<double> domain_losses;
    std::vector<double> scores;

    std::vector<nn::ForwardCache> ext_source; // extractor over each source batch
    nn::ForwardCache ext_target;              // extractor over the target batch
    std::vector<nn::ForwardCache> head;       // task head over source features
    std::vector<nn::ForwardCache> disc;       // discriminator i over [source_i; target]
    std::vector<nn::LossResult> task_grads;   // dL/dlogits per source
    std::vector<nn::LossResult> domain_grads; // dL/dlogits per discriminator
};

ScoreBundle domain_scores(const MdanModel& model, const std::vector<Batch>& source_batches,
                          const Batch& target_batch, double dropout = 0.0,
                          std::uint64_t dropout_seed = 0);

// Softmax of gamma * eps with max-subtraction.
std::vector<double> soft_weights(const std::vector<double>& eps, double gamma);

struct StepGradients {
    nn::Gradients extractor;
    nn::Gradients task_head;
    std::vector<nn::Gradients> discriminators; // each scaled by its domain weight
};

// Backward pass for the weighted objective sum_i w_i * score_i. The task
// part descends through head and extractor; the domain part reaches the
// extractor through gradient reversal at strength mu while each
// discriminator descends its own loss. Zero-weight domains contribute
// nothing anywhere.
StepGradients assemble_gradients(const MdanModel& model, const ScoreBundle& bundle,
                                 const std::vector<double>& weights, double mu);

struct OptStates {
    nn::AdamState extractor;
    nn::AdamState task_head;
    std::vector<nn::AdamState> discriminators;

    static OptStates init(const MdanModel& model, const nn::AdamConfig& config);
};

// Single simultaneous update on the worst-scoring domain: its task loss
// descends through head and extractor, its discriminator descends its own
// loss, and the extractor receives the reversed domain gradient scaled by
// mu. The other discriminators are left untouched, optimizer state included.
StepTrace step_hard(MdanModel& model, const std::vector<Batch>& source_batches,
                    const Batch& target_batch, const TrainConfig& config, OptStates& states);

// Same update with every domain active at weight w_i = soft_weights(scores).
StepTrace step_soft(MdanModel& model, const std::vector<Batch>& source_batches,
                    const Batch& target_batch, const TrainConfig& config, OptStates& states);

struct TrainResult {
    std::vector<StepTrace> history;
};

// Minibatch loop: per step, batch_size rows from every source and the same
// number of unlabeled target rows; ceil(max source size / batch_size) steps
// per epoch. Fully deterministic given config.seed.
TrainResult train(MdanModel& model, const std::vector<data::LabeledDomain>& sources,
                  const data::UnlabeledDomain& target, const TrainConfig& config);

enum class Metric { Accuracy, Mae };

Metric metric_from_string(const std::string& s);

Matrix predict_scores(const MdanModel& model, const Matrix& x);
std::vector<int> predict(const MdanModel& model, const Matrix& x);
double evaluate(const MdanModel& model, const data::LabeledDomain& dom, Metric metric);

} // namespace msda::mdan
