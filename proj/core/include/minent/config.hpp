#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace minent {

/// Configuration parse/lookup error; the message carries file, line and field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sectioned key/value configuration:
///
///   # comment
///   [section]
///   key = 1.25
///   name = "text"
///   flag = true
///   values = [1.0, 2.0, 3.0]
///
/// Numbers are decimal doubles; arrays hold numbers or quoted strings.
class Config {
public:
    using Value = std::variant<double, bool, std::string, std::vector<double>,
                               std::vector<std::string>>;

    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<config>");

    bool has(const std::string& section, const std::string& key) const;

    double number(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key, double fallback) const;
    long integer(const std::string& section, const std::string& key) const;
    long integer_or(const std::string& section, const std::string& key, long fallback) const;
    std::string text(const std::string& section, const std::string& key) const;
    std::string text_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    bool flag_or(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key) const;
    std::vector<double> numbers_or(const std::string& section, const std::string& key,
                                   std::vector<double> fallback) const;
    std::vector<std::string> strings(const std::string& section, const std::string& key) const;

    std::vector<std::string> sections() const;
    bool has_section(const std::string& section) const;

    /// Override (or create) a value; used by parameter sweeps.
    void set(const std::string& section, const std::string& key, Value v);

private:
    const Value& lookup(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, Value>> data_;
    std::string origin_;
};

} // namespace minent
