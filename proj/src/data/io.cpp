#include "msda/data/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "msda/error.hpp"

namespace msda::data {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no, const std::string& why) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + why);
}

double parse_double(const std::string& path, std::size_t line_no, const std::string& tok) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) parse_fail(path, line_no, "bad number '" + tok + "'");
    return v;
}

int parse_label(const std::string& path, std::size_t line_no, const std::string& tok) {
    int v = 0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) parse_fail(path, line_no, "bad label '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    return f;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    return f;
}

} // namespace

LoadedDomain load_dense_csv(const std::string& path, bool has_labels) {
    auto f = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(f, line)) parse_fail(path, 1, "missing header row");
    ++line_no;
    const std::size_t cols = split(line, ',').size();
    const std::size_t dim = has_labels ? cols - 1 : cols;
    if (dim == 0) parse_fail(path, 1, "no feature columns");

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t n = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto toks = split(line, ',');
        if (toks.size() != cols)
            parse_fail(path, line_no,
                       "expected " + std::to_string(cols) + " fields, got " + std::to_string(toks.size()));
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = parse_double(path, line_no, trim(toks[j]));
            if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite feature");
            values.push_back(v);
        }
        if (has_labels) labels.push_back(parse_label(path, line_no, trim(toks[dim])));
        ++n;
    }
    if (n == 0) throw InputError(path + ": empty dataset");

    LoadedDomain out;
    out.x = Matrix(n, dim);
    out.x.data() = std::move(values);
    if (has_labels) out.y = std::move(labels);
    return out;
}

void save_dense_csv(const std::string& path, const Matrix& x, const std::vector<int>* y) {
    if (y && y->size() != x.rows()) throw InputError("save_dense_csv: label count mismatch");
    auto f = open_out(path);
    for (std::size_t j = 0; j < x.cols(); ++j) f << (j ? "," : "") << "f" << j;
    if (y) f << ",label";
    f << "\n";
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) f << (j ? "," : "") << fmt_double(x(i, j));
        if (y) f << "," << (*y)[i];
        f << "\n";
    }
}

LoadedDomain load_sparse_sv(const std::string& path, std::size_t dim) {
    if (dim == 0) throw InputError("load_sparse_sv: dim must be > 0");
    auto f = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t n = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) parse_fail(path, line_no, "missing label");
        labels.push_back(parse_label(path, line_no, tok));
        std::vector<double> row(dim, 0.0);
        long prev = -1;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) parse_fail(path, line_no, "expected idx:val, got '" + tok + "'");
            const long idx = parse_label(path, line_no, tok.substr(0, colon));
            if (idx < 0 || static_cast<std::size_t>(idx) >= dim)
                parse_fail(path, line_no,
                           "index " + std::to_string(idx) + " outside dim " + std::to_string(dim));
            if (idx <= prev) parse_fail(path, line_no, "indices must be strictly increasing");
            const double v = parse_double(path, line_no, tok.substr(colon + 1));
            if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite feature");
            row[static_cast<std::size_t>(idx)] = v;
            prev = idx;
        }
        values.insert(values.end(), row.begin(), row.end());
        ++n;
    }
    if (n == 0) throw InputError(path + ": empty dataset");

    LoadedDomain out;
    out.x = Matrix(n, dim);
    out.x.data() = std::move(values);
    out.y = std::move(labels);
    return out;
}

void save_sparse_sv(const std::string& path, const Matrix& x, const std::vector<int>& y) {
    if (y.size() != x.rows()) throw InputError("save_sparse_sv: label count mismatch");
    auto f = open_out(path);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        f << y[i];
        for (std::size_t j = 0; j < x.cols(); ++j)
            if (x(i, j) != 0.0) f << " " << j << ":" << fmt_double(x(i, j));
        f << "\n";
    }
}

void DomainManifest::validate() const {
    if (dim == 0) throw ConfigError("manifest: dim must be set");
    std::size_t targets = 0, sources = 0;
    for (const auto& e : entries) (e.role == DomainRole::Target ? targets : sources)++;
    if (targets != 1) throw ConfigError("manifest: need exactly one target entry, got " +
                                        std::to_string(targets));
    if (sources == 0) throw ConfigError("manifest: need at least one source entry");
}

DomainManifest load_manifest(const std::string& path) {
    auto f = open_in(path);
    DomainManifest m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(path, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "dim") {
            m.dim = static_cast<std::size_t>(parse_label(path, line_no, value));
        } else if (key == "entry") {
            std::istringstream vs(value);
            ManifestEntry e;
            std::string role, fmt, lab;
            if (!(vs >> e.path >> role >> fmt >> lab))
                parse_fail(path, line_no, "entry needs: path role format labeled|unlabeled");
            if (role == "source") e.role = DomainRole::Source;
            else if (role == "target") e.role = DomainRole::Target;
            else parse_fail(path, line_no, "role must be source|target");
            if (fmt == "dense_csv") e.format = FileFormat::DenseCsv;
            else if (fmt == "sparse_sv") e.format = FileFormat::SparseSv;
            else parse_fail(path, line_no, "format must be dense_csv|sparse_sv");
            if (lab == "labeled") e.labeled = true;
            else if (lab == "unlabeled") e.labeled = false;
            else parse_fail(path, line_no, "flag must be labeled|unlabeled");
            m.entries.push_back(std::move(e));
        } else {
            parse_fail(path, line_no, "unknown key '" + key + "'");
        }
    }
    m.validate();
    return m;
}

void save_manifest(const std::string& path, const DomainManifest& manifest) {
    manifest.validate();
    auto f = open_out(path);
    f << "# msda domain manifest\n";
    f << "dim = " << manifest.dim << "\n";
    for (const auto& e : manifest.entries) {
        f << "entry = " << e.path << " " << (e.role == DomainRole::Target ? "target" : "source")
          << " " << (e.format == FileFormat::DenseCsv ? "dense_csv" : "sparse_sv") << " "
          << (e.labeled ? "labeled" : "unlabeled") << "\n";
    }
}

ManifestData load_manifest_domains(const std::string& manifest_path) {
    const DomainManifest m = load_manifest(manifest_path);
    const auto base = std::filesystem::path(manifest_path).parent_path();

    ManifestData out;
    int next_id = 0;
    for (const auto& e : m.entries) {
        std::filesystem::path p(e.path);
        if (p.is_relative()) p = base / p;
        LoadedDomain d = e.format == FileFormat::DenseCsv
                             ? load_dense_csv(p.string(), e.labeled)
                             : load_sparse_sv(p.string(), m.dim);
        if (d.x.cols() != m.dim)
            throw ConfigError(p.string() + ": dim " + std::to_string(d.x.cols()) +
                              " does not match manifest dim " + std::to_string(m.dim));
        if (e.role == DomainRole::Source) {
            if (!d.y) throw ConfigError(p.string() + ": source entry must be labeled");
            out.sources.push_back({std::move(d.x), std::move(*d.y), next_id});
        } else {
            // Target labels, if any, are oracle-only regardless of the flag.
            if (d.y)
                out.target = UnlabeledDomain(std::move(d.x), next_id, std::move(*d.y));
            else
                out.target = UnlabeledDomain(std::move(d.x), next_id);
        }
        ++next_id;
    }
    return out;
}

} // namespace msda::data
