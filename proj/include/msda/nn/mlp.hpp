#pragma once

#include <cstdint>
#include <vector>

#include "msda/matrix.hpp"
#include "msda/rng.hpp"

namespace msda::nn {

enum class Activation { Relu, Identity };

struct Layer {
    Matrix weight;              // out x in
    std::vector<double> bias;   // out
    Activation act = Activation::Identity;

    std::size_t in_dim() const { return weight.cols(); }
    std::size_t out_dim() const { return weight.rows(); }
};

// Dense feed-forward parameter group. Adjacent layer dims chain; the chain
// is validated on construction and after every optimizer step.
struct Mlp {
    std::vector<Layer> layers;

    std::size_t in_dim() const { return layers.front().in_dim(); }
    std::size_t out_dim() const { return layers.back().out_dim(); }
    std::size_t parameter_count() const;
    void check_shapes() const;
    bool all_finite() const;
};

// Glorot-uniform init (+-sqrt(6/(fan_in+fan_out))), zero bias. All layers
// except the last use `hidden_act`; the last is identity (logits).
Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
             Activation hidden_act, Rng& rng);

// Everything the backward pass needs from one forward run.
struct ForwardCache {
    Matrix input;                      // m x in
    std::vector<Matrix> pre;           // pre-activation per layer
    std::vector<Matrix> post;          // post-activation (after dropout) per layer
    std::vector<Matrix> dropout_scale; // per-entry keep/scale factors; empty when rate = 0
    double dropout_rate = 0.0;

    const Matrix& output() const { return post.back(); }
};

// Inverted dropout on hidden (relu) activations; mask derived from
// `dropout_seed` only, so identical inputs give bitwise-identical outputs.
ForwardCache forward(const Mlp& params, const Matrix& x, double dropout_rate = 0.0,
                     std::uint64_t dropout_seed = 0);

// Gradients shaped exactly like an Mlp.
struct Gradients {
    std::vector<Matrix> weight;
    std::vector<std::vector<double>> bias;

    static Gradients zeros_like(const Mlp& params);
    void add_scaled(const Gradients& other, double scale);
    void scale(double s);
    bool all_finite() const;
};

// Reverse-mode pass: dL/d(output) -> parameter gradients. When `grad_input`
// is non-null it receives dL/d(input), which is how gradients chain across
// parameter groups (extractor <- heads).
Gradients backward(const Mlp& params, const ForwardCache& cache, const Matrix& grad_output,
                   Matrix* grad_input = nullptr);

// Gradient reversal: multiply by -mu. Identity in the forward direction is
// implicit (features pass through unchanged); this is the backward half.
Matrix grad_reverse(const Matrix& g, double mu);
Gradients grad_reverse(const Gradients& g, double mu);

enum class LossKind { SoftmaxXent, Logistic };

struct LossResult {
    double value = 0.0;
    Matrix grad; // dL/dlogits, mean-reduced over the batch
};

// Mean-reduced classification surrogate. SoftmaxXent works for any class
// count; Logistic requires 1 or 2 logit columns and {0,1} labels.
LossResult loss(const Matrix& logits, const std::vector<int>& labels, LossKind kind);

} // namespace msda::nn
