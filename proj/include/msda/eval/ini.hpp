#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace msda::eval {

// Flat key = value text with [section] headers. '#' starts a comment,
// blank lines are ignored, later duplicate keys overwrite earlier ones.
class IniFile {
public:
    static IniFile parse(std::istream& in, const std::string& origin = "<stream>");
    static IniFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;

    // Comma- or whitespace-separated scalars.
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section,
                                        const std::string& key) const;
    // Semicolon-separated groups of scalars (vectors of vectors).
    std::vector<std::vector<double>> get_vector_list(const std::string& section,
                                                     const std::string& key) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;
};

} // namespace msda::eval
