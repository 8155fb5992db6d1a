#include "msda/mdan/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "msda/error.hpp"
#include "msda/nn/checkpoint.hpp"

namespace msda::mdan {

namespace {
constexpr const char* kMagic = "MSDA-MDAN v1";
}

void save_model(std::ostream& out, const MdanModel& model) {
    model.check_shapes();
    out << kMagic << "\n";
    out << "k " << model.k << " classes " << model.num_classes << "\n";
    nn::save_mlp(out, model.extractor);
    nn::save_mlp(out, model.task_head);
    for (const nn::Mlp& d : model.discriminators) {
        nn::save_mlp(out, d);
    }
}

MdanModel load_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw ParseError("model file: missing magic header");
    }
    if (!std::getline(in, line)) {
        throw ParseError("model file: truncated header");
    }
    std::istringstream head(line);
    std::string w1, w2;
    MdanModel model;
    if (!(head >> w1 >> model.k >> w2 >> model.num_classes) || w1 != "k" || w2 != "classes") {
        throw ParseError("model file: bad header line '" + line + "'");
    }
    if (model.k < 1) {
        throw ParseError("model file: source count must be positive");
    }
    model.extractor = nn::load_mlp(in);
    model.task_head = nn::load_mlp(in);
    model.discriminators.reserve(model.k);
    for (int i = 0; i < model.k; ++i) {
        model.discriminators.push_back(nn::load_mlp(in));
    }
    model.check_shapes();
    return model;
}

void save_model_file(const std::string& path, const MdanModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    save_model(out, model);
    if (!out) {
        throw InputError("write failed for '" + path + "'");
    }
}

MdanModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return load_model(in);
}

} // namespace msda::mdan
