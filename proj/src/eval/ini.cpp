#include "msda/eval/ini.hpp"

#include <fstream>
#include <sstream>

#include "msda/error.hpp"

namespace msda::eval {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_any(const std::string& s, const std::string& seps) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (seps.find(c) != std::string::npos) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

double to_double(const std::string& tok, const std::string& context) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ConfigError(context + ": expected a number, got '" + tok + "'");
    }
    if (pos != tok.size()) {
        throw ConfigError(context + ": expected a number, got '" + tok + "'");
    }
    return v;
}

long long to_int(const std::string& tok, const std::string& context) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw ConfigError(context + ": expected an integer, got '" + tok + "'");
    }
    if (pos != tok.size()) {
        throw ConfigError(context + ": expected an integer, got '" + tok + "'");
    }
    return v;
}

} // namespace

IniFile IniFile::parse(std::istream& in, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(origin + ":" + std::to_string(lineno) +
                                 ": malformed section header");
            }
            section = strip(line.substr(1, line.size() - 2));
            ini.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": expected key = value");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        ini.sections_[section][key] = value;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return parse(in, path);
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key)) {
        throw ConfigError(origin_ + ": missing [" + section + "] " + key);
    }
    return s->second.at(key);
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

long long IniFile::get_int(const std::string& section, const std::string& key) const {
    return to_int(get(section, key), "[" + section + "] " + key);
}

long long IniFile::get_int_or(const std::string& section, const std::string& key,
                              long long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    return to_double(get(section, key), "[" + section + "] " + key);
}

double IniFile::get_double_or(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::vector<std::string> IniFile::get_list(const std::string& section,
                                           const std::string& key) const {
    return split_any(get(section, key), ", \t");
}

std::vector<double> IniFile::get_double_list(const std::string& section,
                                             const std::string& key) const {
    std::vector<double> out;
    for (const std::string& tok : get_list(section, key)) {
        out.push_back(to_double(tok, "[" + section + "] " + key));
    }
    return out;
}

std::vector<std::vector<double>> IniFile::get_vector_list(const std::string& section,
                                                          const std::string& key) const {
    std::vector<std::vector<double>> out;
    for (const std::string& group : split_any(get(section, key), ";")) {
        std::vector<double> vec;
        for (const std::string& tok : split_any(group, ", \t")) {
            vec.push_back(to_double(tok, "[" + section + "] " + key));
        }
        if (!vec.empty()) {
            out.push_back(std::move(vec));
        }
    }
    return out;
}

} // namespace msda::eval
