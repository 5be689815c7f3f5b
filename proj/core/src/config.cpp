#include "minent/config.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

namespace minent {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Strip a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool parse_number(const std::string& s, double* out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return false;
    *out = v;
    return true;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    std::ostringstream msg;
    msg << origin << ":" << line << ": " << what;
    throw ConfigError(msg.str());
}

Config::Value parse_value(const std::string& raw, const std::string& origin, int line) {
    const std::string v = trim(raw);
    if (v.empty()) fail(origin, line, "empty value");
    if (v.front() == '[') {
        if (v.back() != ']') fail(origin, line, "unterminated array");
        const std::string inner = v.substr(1, v.size() - 2);
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool any_string = false;
        std::size_t start = 0;
        bool quoted = false;
        std::vector<std::string> items;
        for (std::size_t i = 0; i <= inner.size(); ++i) {
            if (i < inner.size() && inner[i] == '"') quoted = !quoted;
            if (i == inner.size() || (inner[i] == ',' && !quoted)) {
                const std::string item = trim(inner.substr(start, i - start));
                if (!item.empty()) items.push_back(item);
                start = i + 1;
            }
        }
        for (const std::string& item : items) {
            double num = 0.0;
            if (item.size() >= 2 && item.front() == '"' && item.back() == '"') {
                any_string = true;
                strs.push_back(item.substr(1, item.size() - 2));
            } else if (parse_number(item, &num)) {
                nums.push_back(num);
                strs.push_back(item);
            } else {
                fail(origin, line, "array item '" + item + "' is neither a number nor quoted");
            }
        }
        if (any_string) return strs;
        return nums;
    }
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (v == "true") return true;
    if (v == "false") return false;
    double num = 0.0;
    if (parse_number(v, &num)) return num;
    // Bare word: treat as a string.
    for (char c : v) {
        if (std::isspace(static_cast<unsigned char>(c)))
            fail(origin, line, "value '" + v + "' is not a number, quoted string, bool or array");
    }
    return v;
}

} // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string stripped = trim(strip_comment(line));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') fail(origin, line_no, "unterminated section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty()) fail(origin, line_no, "empty section name");
            cfg.data_[section]; // ensure the section exists even if empty
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty()) fail(origin, line_no, "empty key");
        if (section.empty()) fail(origin, line_no, "key '" + key + "' outside any [section]");
        cfg.data_[section][key] = parse_value(stripped.substr(eq + 1), origin, line_no);
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

const Config::Value& Config::lookup(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    if (s == data_.end()) throw ConfigError(origin_ + ": missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
        throw ConfigError(origin_ + ": missing field '" + key + "' in [" + section + "]");
    return k->second;
}

double Config::number(const std::string& section, const std::string& key) const {
    const Value& v = lookup(section, key);
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw ConfigError(origin_ + ": field '" + key + "' in [" + section + "] must be a number");
}

double Config::number_or(const std::string& section, const std::string& key,
                         double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

long Config::integer(const std::string& section, const std::string& key) const {
    return std::lround(number(section, key));
}

long Config::integer_or(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? integer(section, key) : fallback;
}

std::string Config::text(const std::string& section, const std::string& key) const {
    const Value& v = lookup(section, key);
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError(origin_ + ": field '" + key + "' in [" + section + "] must be a string");
}

std::string Config::text_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? text(section, key) : fallback;
}

bool Config::flag_or(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const Value& v = lookup(section, key);
    if (const bool* b = std::get_if<bool>(&v)) return *b;
    throw ConfigError(origin_ + ": field '" + key + "' in [" + section + "] must be a bool");
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
    const Value& v = lookup(section, key);
    if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    if (const double* d = std::get_if<double>(&v)) return {*d};
    throw ConfigError(origin_ + ": field '" + key + "' in [" + section +
                      "] must be a numeric array");
}

std::vector<double> Config::numbers_or(const std::string& section, const std::string& key,
                                       std::vector<double> fallback) const {
    return has(section, key) ? numbers(section, key) : fallback;
}

std::vector<std::string> Config::strings(const std::string& section, const std::string& key) const {
    const Value& v = lookup(section, key);
    if (const auto* a = std::get_if<std::vector<std::string>>(&v)) return *a;
    if (const std::string* s = std::get_if<std::string>(&v)) return {*s};
    throw ConfigError(origin_ + ": field '" + key + "' in [" + section +
                      "] must be a string array");
}

std::vector<std::string> Config::sections() const {
    std::vector<std::string> out;
    for (const auto& [name, table] : data_) out.push_back(name);
    return out;
}

void Config::set(const std::string& section, const std::string& key, Value v) {
    data_[section][key] = std::move(v);
}

} // namespace minent
