#include "msda/nn/adam.hpp"

#include <cmath>
#include <string>

#include "msda/error.hpp"

namespace msda::nn {

AdamState AdamState::init(const Mlp& params, const AdamConfig& config) {
    AdamState s;
    s.config = config;
    s.first_moment = Gradients::zeros_like(params);
    s.second_moment = Gradients::zeros_like(params);
    s.step = 0;
    return s;
}

namespace {

void update_span(double* p, const double* g, double* m, double* v, std::size_t n,
                 const AdamConfig& c, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
}

} // namespace

void opt_step(Mlp& params, const Gradients& grads, AdamState& state) {
    const std::size_t n_layers = params.layers.size();
    if (grads.weight.size() != n_layers || state.first_moment.weight.size() != n_layers)
        throw ShapeError("opt_step: layer count mismatch");

    for (std::size_t li = 0; li < n_layers; ++li) {
        if (grads.weight[li].rows() != params.layers[li].out_dim() ||
            grads.weight[li].cols() != params.layers[li].in_dim() ||
            grads.bias[li].size() != params.layers[li].bias.size())
            throw ShapeError("opt_step: gradient shape mismatch at layer " + std::to_string(li));
        if (!grads.weight[li].all_finite())
            throw NumericError("opt_step: non-finite weight gradient at layer " +
                               std::to_string(li));
        for (double b : grads.bias[li])
            if (!std::isfinite(b))
                throw NumericError("opt_step: non-finite bias gradient at layer " +
                                   std::to_string(li));
    }

    state.step += 1;
    const auto& c = state.config;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));

    for (std::size_t li = 0; li < n_layers; ++li) {
        Layer& l = params.layers[li];
        update_span(l.weight.data().data(), grads.weight[li].data().data(),
                    state.first_moment.weight[li].data().data(),
                    state.second_moment.weight[li].data().data(), l.weight.size(), c, bc1, bc2);
        update_span(l.bias.data(), grads.bias[li].data(), state.first_moment.bias[li].data(),
                    state.second_moment.bias[li].data(), l.bias.size(), c, bc1, bc2);
        if (!l.weight.all_finite())
            throw NumericError("opt_step: parameters non-finite after update at layer " +
                               std::to_string(li));
    }
}

} // namespace msda::nn
