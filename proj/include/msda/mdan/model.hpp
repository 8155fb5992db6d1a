#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msda/nn/mlp.hpp"
#include "msda/rng.hpp"

namespace msda::mdan {

// Shared feature extractor, one task head, and one domain discriminator per
// source. Discriminator i separates source-i rows (label 1) from target
// rows (label 0) in feature space.
struct MdanModel {
    nn::Mlp extractor;
    nn::Mlp task_head;
    std::vector<nn::Mlp> discriminators;
    int k = 0;
    int num_classes = 2;

    std::size_t feature_dim() const { return extractor.out_dim(); }
    void check_shapes() const;
};

struct ModelSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> extractor_hidden = {16}; // last entry = feature width
    std::vector<std::size_t> head_hidden = {};
    std::vector<std::size_t> disc_hidden = {};
    int num_classes = 2;
    int k = 1;
};

MdanModel make_mdan(const ModelSpec& spec, Rng& rng);

enum class Mode { Hard, Soft };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode mode);

struct TrainConfig {
    Mode mode = Mode::Soft;
    double gamma = 10.0;         // sharpness of the soft maximum
    double mu = 0.1;             // weight on the reversed domain gradient
    double learning_rate = 1e-3;
    int batch_size = 16;
    int epochs = 1;              // 0 is allowed and leaves the model untouched
    double dropout = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct StepTrace {
    int step = 0;
    std::vector<double> task_losses;   // surrogate task loss per source
    std::vector<double> domain_losses; // discriminator surrogate loss per source
    std::vector<double> scores;        // task , domain
    std::vector<double> weights;       // simplex (soft) or one-hot (hard)
    std::size_t chosen = 0;            // argmax score, lowest index on ties
    double objective = 0.0;            // max (hard) or soft max (soft) of scores
};

// One line per step: step index, scores, weights or chosen index, losses.
std::string format_step_trace(const StepTrace& t, Mode mode);

} // namespace msda::mdan
