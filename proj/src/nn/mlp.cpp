#include "msda/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msda/error.hpp"

namespace msda::nn {

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

void Mlp::check_shapes() const {
    if (layers.empty()) throw ShapeError("mlp has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].bias.size() != layers[i].out_dim())
            throw ShapeError("layer " + std::to_string(i) + ": bias size " +
                             std::to_string(layers[i].bias.size()) + " != out dim " +
                             std::to_string(layers[i].out_dim()));
        if (i > 0 && layers[i].in_dim() != layers[i - 1].out_dim())
            throw ShapeError("layer " + std::to_string(i) + ": in dim " +
                             std::to_string(layers[i].in_dim()) + " != previous out dim " +
                             std::to_string(layers[i - 1].out_dim()));
    }
}

bool Mlp::all_finite() const {
    for (const auto& l : layers) {
        if (!l.weight.all_finite()) return false;
        for (double b : l.bias)
            if (!std::isfinite(b)) return false;
    }
    return true;
}

Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
             Activation hidden_act, Rng& rng) {
    Mlp mlp;
    std::size_t prev = in;
    auto add_layer = [&](std::size_t width, Activation act) {
        Layer l;
        l.weight = Matrix(width, prev);
        const double bound = std::sqrt(6.0 / static_cast<double>(prev + width));
        for (double& w : l.weight.data()) w = rng.uniform(-bound, bound);
        l.bias.assign(width, 0.0);
        l.act = act;
        mlp.layers.push_back(std::move(l));
        prev = width;
    };
    for (std::size_t h : hidden) add_layer(h, hidden_act);
    add_layer(out, Activation::Identity);
    mlp.check_shapes();
    return mlp;
}

ForwardCache forward(const Mlp& params, const Matrix& x, double dropout_rate,
                     std::uint64_t dropout_seed) {
    params.check_shapes();
    if (x.cols() != params.in_dim())
        throw ShapeError("forward: input dim " + std::to_string(x.cols()) +
                         " != first layer in dim " + std::to_string(params.in_dim()));
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw InputError("forward: dropout rate must be in [0,1)");

    ForwardCache cache;
    cache.input = x;
    cache.dropout_rate = dropout_rate;
    Rng drop_rng(Rng::derive(dropout_seed, 0xd209u));
    const double keep = 1.0 - dropout_rate;

    const Matrix* cur = &x;
    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        const Layer& l = params.layers[li];
        Matrix z = matmul_nt(*cur, l.weight); // m x out
        for (std::size_t i = 0; i < z.rows(); ++i)
            for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += l.bias[j];
        cache.pre.push_back(z);

        Matrix a = std::move(z);
        if (l.act == Activation::Relu) {
            for (double& v : a.data()) v = v > 0.0 ? v : 0.0;
            if (dropout_rate > 0.0) {
                Matrix scale(a.rows(), a.cols());
                for (std::size_t i = 0; i < scale.size(); ++i)
                    scale.data()[i] = drop_rng.uniform() < dropout_rate ? 0.0 : 1.0 / keep;
                for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] *= scale.data()[i];
                cache.dropout_scale.push_back(std::move(scale));
            }
        }
        if (dropout_rate > 0.0 && l.act != Activation::Relu)
            cache.dropout_scale.emplace_back(); // placeholder keeps indices aligned
        cache.post.push_back(std::move(a));
        cur = &cache.post.back();
    }
    return cache;
}

Gradients Gradients::zeros_like(const Mlp& params) {
    Gradients g;
    for (const auto& l : params.layers) {
        g.weight.emplace_back(l.out_dim(), l.in_dim());
        g.bias.emplace_back(l.out_dim(), 0.0);
    }
    return g;
}

void Gradients::add_scaled(const Gradients& other, double scale) {
    if (other.weight.size() != weight.size()) throw ShapeError("gradient layer count mismatch");
    for (std::size_t li = 0; li < weight.size(); ++li) {
        if (other.weight[li].size() != weight[li].size())
            throw ShapeError("gradient shape mismatch at layer " + std::to_string(li));
        for (std::size_t i = 0; i < weight[li].size(); ++i)
            weight[li].data()[i] += scale * other.weight[li].data()[i];
        for (std::size_t i = 0; i < bias[li].size(); ++i)
            bias[li][i] += scale * other.bias[li][i];
    }
}

void Gradients::scale(double s) {
    for (auto& w : weight)
        for (double& v : w.data()) v *= s;
    for (auto& b : bias)
        for (double& v : b) v *= s;
}

bool Gradients::all_finite() const {
    for (const auto& w : weight)
        if (!w.all_finite()) return false;
    for (const auto& b : bias)
        for (double v : b)
            if (!std::isfinite(v)) return false;
    return true;
}

Gradients backward(const Mlp& params, const ForwardCache& cache, const Matrix& grad_output,
                   Matrix* grad_input) {
    const std::size_t n_layers = params.layers.size();
    if (cache.pre.size() != n_layers || cache.post.size() != n_layers)
        throw ShapeError("backward: cache does not match params (layer count)");
    if (grad_output.rows() != cache.input.rows() || grad_output.cols() != params.out_dim())
        throw ShapeError("backward: grad_output shape mismatch");

    Gradients grads = Gradients::zeros_like(params);
    Matrix delta = grad_output; // dL/d(post activation of current layer)

    for (std::size_t li = n_layers; li-- > 0;) {
        const Layer& l = params.layers[li];
        if (l.act == Activation::Relu) {
            if (cache.dropout_rate > 0.0 && !cache.dropout_scale[li].empty()) {
                const Matrix& scale = cache.dropout_scale[li];
                for (std::size_t i = 0; i < delta.size(); ++i) delta.data()[i] *= scale.data()[i];
            }
            const Matrix& pre = cache.pre[li];
            for (std::size_t i = 0; i < delta.size(); ++i)
                if (pre.data()[i] <= 0.0) delta.data()[i] = 0.0;
        }
        const Matrix& layer_in = li == 0 ? cache.input : cache.post[li - 1];
        grads.weight[li] = matmul_tn(delta, layer_in); // out x in
        for (std::size_t i = 0; i < delta.rows(); ++i)
            for (std::size_t j = 0; j < delta.cols(); ++j) grads.bias[li][j] += delta(i, j);
        if (li > 0 || grad_input) {
            Matrix next = matmul(delta, l.weight); // m x in
            if (li == 0) {
                *grad_input = std::move(next);
            } else {
                delta = std::move(next);
            }
        }
    }
    return grads;
}

Matrix grad_reverse(const Matrix& g, double mu) {
    Matrix out = g;
    for (double& v : out.data()) v *= -mu;
    return out;
}

Gradients grad_reverse(const Gradients& g, double mu) {
    Gradients out = g;
    out.scale(-mu);
    return out;
}

namespace {

void check_labels(const Matrix& logits, const std::vector<int>& labels, int max_class) {
    if (labels.size() != logits.rows())
        throw ShapeError("loss: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(logits.rows()) + " rows");
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0 || labels[i] >= max_class)
            throw InputError("loss: label " + std::to_string(labels[i]) + " at row " +
                             std::to_string(i) + " outside [0," + std::to_string(max_class) + ")");
}

LossResult softmax_xent(const Matrix& logits, const std::vector<int>& labels) {
    const std::size_t m = logits.rows(), c = logits.cols();
    LossResult out;
    out.grad = Matrix(m, c);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = logits.row_ptr(i);
        const double mx = *std::max_element(row, row + c);
        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) sum += std::exp(row[j] - mx);
        const double lse = mx + std::log(sum);
        out.value += (lse - row[static_cast<std::size_t>(labels[i])]) * inv_m;
        for (std::size_t j = 0; j < c; ++j) {
            double p = std::exp(row[j] - lse);
            out.grad(i, j) = (p - (static_cast<std::size_t>(labels[i]) == j ? 1.0 : 0.0)) * inv_m;
        }
    }
    return out;
}

// Binary cross-entropy on a single logit z: stable via softplus.
LossResult logistic_loss(const Matrix& logits, const std::vector<int>& labels) {
    const std::size_t m = logits.rows(), c = logits.cols();
    LossResult out;
    out.grad = Matrix(m, c);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double z = c == 1 ? logits(i, 0) : logits(i, 1) - logits(i, 0);
        const int y = labels[i];
        // softplus(z) - y*z  ==  -[y log s(z) + (1-y) log(1-s(z))]
        const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        out.value += (softplus - y * z) * inv_m;
        const double sig = 1.0 / (1.0 + std::exp(-z));
        const double dz = (sig - y) * inv_m;
        if (c == 1) {
            out.grad(i, 0) = dz;
        } else {
            out.grad(i, 1) = dz;
            out.grad(i, 0) = -dz;
        }
    }
    return out;
}

} // namespace

LossResult loss(const Matrix& logits, const std::vector<int>& labels, LossKind kind) {
    if (logits.rows() == 0) throw InputError("loss: empty batch");
    if (kind == LossKind::Logistic) {
        if (logits.cols() != 1 && logits.cols() != 2)
            throw InputError("logistic loss needs 1 or 2 logit columns");
        check_labels(logits, labels, 2);
        return logistic_loss(logits, labels);
    }
    check_labels(logits, labels, static_cast<int>(logits.cols()));
    return softmax_xent(logits, labels);
}

} // namespace msda::nn
