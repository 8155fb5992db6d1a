#include "msda/nn/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "msda/error.hpp"

namespace msda::nn {

namespace {

constexpr const char* kMagic = "MSDA-CKPT v1";

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& tok) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("checkpoint: bad number '" + tok + "'");
    }
    if (pos != tok.size()) {
        throw ParseError("checkpoint: bad number '" + tok + "'");
    }
    return v;
}

std::string act_name(Activation a) {
    return a == Activation::Relu ? "relu" : "identity";
}

Activation act_from_name(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "identity") return Activation::Identity;
    throw ParseError("checkpoint: unknown activation '" + s + "'");
}

} // namespace

void save_mlp(std::ostream& out, const Mlp& params) {
    out << kMagic << "\n";
    out << "layers " << params.layers.size() << "\n";
    for (const Layer& layer : params.layers) {
        out << "layer " << layer.weight.rows() << " " << layer.weight.cols()
            << " " << act_name(layer.act) << "\n";
        for (std::size_t r = 0; r < layer.weight.rows(); ++r) {
            for (std::size_t c = 0; c < layer.weight.cols(); ++c) {
                if (c) out << " ";
                out << fmt_double(layer.weight(r, c));
            }
            out << "\n";
        }
        for (std::size_t r = 0; r < layer.bias.size(); ++r) {
            if (r) out << " ";
            out << fmt_double(layer.bias[r]);
        }
        out << "\n";
    }
}

Mlp load_mlp(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw ParseError("checkpoint: missing magic header");
    }
    if (!std::getline(in, line)) {
        throw ParseError("checkpoint: truncated header");
    }
    std::istringstream head(line);
    std::string word;
    std::size_t n_layers = 0;
    if (!(head >> word >> n_layers) || word != "layers") {
        throw ParseError("checkpoint: bad layer count line '" + line + "'");
    }
    Mlp params;
    params.layers.reserve(n_layers);
    for (std::size_t li = 0; li < n_layers; ++li) {
        if (!std::getline(in, line)) {
            throw ParseError("checkpoint: truncated at layer header");
        }
        std::istringstream lh(line);
        std::size_t rows = 0, cols = 0;
        std::string act;
        if (!(lh >> word >> rows >> cols >> act) || word != "layer") {
            throw ParseError("checkpoint: bad layer header '" + line + "'");
        }
        if (rows == 0 || cols == 0) {
            throw ParseError("checkpoint: zero-sized layer");
        }
        Layer layer;
        layer.weight = Matrix(rows, cols);
        layer.act = act_from_name(act);
        for (std::size_t r = 0; r < rows; ++r) {
            if (!std::getline(in, line)) {
                throw ParseError("checkpoint: truncated weight row");
            }
            std::istringstream row(line);
            std::string tok;
            for (std::size_t c = 0; c < cols; ++c) {
                if (!(row >> tok)) {
                    throw ParseError("checkpoint: short weight row");
                }
                layer.weight(r, c) = parse_double(tok);
            }
            if (row >> tok) {
                throw ParseError("checkpoint: extra values in weight row");
            }
        }
        if (!std::getline(in, line)) {
            throw ParseError("checkpoint: truncated bias row");
        }
        std::istringstream brow(line);
        layer.bias.assign(rows, 0.0);
        std::string tok;
        for (std::size_t r = 0; r < rows; ++r) {
            if (!(brow >> tok)) {
                throw ParseError("checkpoint: short bias row");
            }
            layer.bias[r] = parse_double(tok);
        }
        if (brow >> tok) {
            throw ParseError("checkpoint: extra values in bias row");
        }
        params.layers.push_back(std::move(layer));
    }
    params.check_shapes();
    return params;
}

void save_mlp_file(const std::string& path, const Mlp& params) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    save_mlp(out, params);
    if (!out) {
        throw InputError("write failed for '" + path + "'");
    }
}

Mlp load_mlp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return load_mlp(in);
}

} // namespace msda::nn
