#include "msda/mdan/model.hpp"

#include <cstdio>
#include <sstream>

#include "msda/error.hpp"

namespace msda::mdan {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

} // namespace

void MdanModel::check_shapes() const {
    if (k < 1) {
        throw ShapeError("model needs at least one source domain");
    }
    if (static_cast<int>(discriminators.size()) != k) {
        throw ShapeError("discriminator count does not match k");
    }
    extractor.check_shapes();
    task_head.check_shapes();
    if (task_head.in_dim() != extractor.out_dim()) {
        throw ShapeError("task head input does not match extractor output");
    }
    if (task_head.out_dim() != static_cast<std::size_t>(num_classes)) {
        throw ShapeError("task head output does not match class count");
    }
    for (const nn::Mlp& d : discriminators) {
        d.check_shapes();
        if (d.in_dim() != extractor.out_dim()) {
            throw ShapeError("discriminator input does not match extractor output");
        }
        if (d.out_dim() != 2) {
            throw ShapeError("discriminator must emit two logits");
        }
    }
}

MdanModel make_mdan(const ModelSpec& spec, Rng& rng) {
    if (spec.input_dim == 0) {
        throw InputError("model input dimension must be positive");
    }
    if (spec.extractor_hidden.empty()) {
        throw InputError("extractor needs at least one layer width");
    }
    if (spec.num_classes < 2) {
        throw InputError("need at least two classes");
    }
    if (spec.k < 1) {
        throw InputError("need at least one source domain");
    }
    MdanModel model;
    model.k = spec.k;
    model.num_classes = spec.num_classes;

    std::vector<std::size_t> ext_hidden(spec.extractor_hidden.begin(),
                                        spec.extractor_hidden.end() - 1);
    const std::size_t feat = spec.extractor_hidden.back();
    model.extractor = nn::make_mlp(spec.input_dim, ext_hidden, feat, nn::Activation::Relu, rng);
    model.extractor.layers.back().act = nn::Activation::Relu;

    model.task_head = nn::make_mlp(feat, spec.head_hidden,
                                   static_cast<std::size_t>(spec.num_classes),
                                   nn::Activation::Relu, rng);
    model.discriminators.reserve(spec.k);
    for (int i = 0; i < spec.k; ++i) {
        model.discriminators.push_back(
            nn::make_mlp(feat, spec.disc_hidden, 2, nn::Activation::Relu, rng));
    }
    model.check_shapes();
    return model;
}

Mode mode_from_string(const std::string& s) {
    if (s == "hard") return Mode::Hard;
    if (s == "soft") return Mode::Soft;
    throw ModeError("unknown training mode '" + s + "' (expected hard or soft)");
}

std::string to_string(Mode mode) {
    return mode == Mode::Hard ? "hard" : "soft";
}

void TrainConfig::validate() const {
    if (!(gamma > 0.0)) {
        throw ConfigError("gamma must be positive");
    }
    if (!(mu >= 0.0)) {
        throw ConfigError("domain weight must be non-negative");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning rate must be positive");
    }
    if (batch_size < 1) {
        throw ConfigError("batch size must be at least 1");
    }
    if (epochs < 0) {
        throw ConfigError("epochs must be non-negative");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw ConfigError("dropout must lie in [0, 1)");
    }
}

std::string format_step_trace(const StepTrace& t, Mode mode) {
    std::ostringstream out;
    out << "step=" << t.step;
    out << " mode=" << to_string(mode);
    out << " scores=" << join(t.scores);
    if (mode == Mode::Hard) {
        out << " chosen=" << t.chosen;
    } else {
        out << " weights=" << join(t.weights);
    }
    out << " task=" << join(t.task_losses);
    out << " domain=" << join(t.domain_losses);
    out << " objective=" << fmt(t.objective);
    return out.str();
}

} // namespace msda::mdan
