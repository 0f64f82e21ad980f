#include "rallnet/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "rallnet/errors.hpp"

namespace rallnet {

namespace {

std::string strip(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Cut a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

TomlLite::Value parse_scalar(const std::string& raw, int line_no) {
    const std::string s = strip(raw);
    if (s.empty()) throw ConfigError("empty value at line " + std::to_string(line_no));
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ConfigError("unterminated string at line " + std::to_string(line_no));
        return s.substr(1, s.size() - 2);
    }
    if (s == "true") return true;
    if (s == "false") return false;
    const bool is_float = s.find_first_of(".eE") != std::string::npos &&
                          s.find_first_not_of("+-0123456789.eE") == std::string::npos;
    try {
        size_t used = 0;
        if (is_float) {
            const double d = std::stod(s, &used);
            if (used == s.size()) return d;
        } else {
            const std::int64_t i = std::stoll(s, &used, 0);
            if (used == s.size()) return i;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("cannot parse value '" + s + "' at line " + std::to_string(line_no));
}

std::vector<TomlLite::Value> parse_array(const std::string& body, int line_no) {
    std::vector<TomlLite::Value> out;
    std::string item;
    bool in_string = false;
    for (char c : body) {
        if (c == '"') in_string = !in_string;
        if (c == ',' && !in_string) {
            if (!strip(item).empty()) out.push_back(parse_scalar(item, line_no));
            item.clear();
        } else {
            item += c;
        }
    }
    if (!strip(item).empty()) out.push_back(parse_scalar(item, line_no));
    return out;
}

}  // namespace

TomlLite TomlLite::parse(const std::string& text) {
    TomlLite doc;
    std::istringstream in(text);
    std::string line, table;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed table header at line " + std::to_string(line_no));
            table = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(line_no));
        std::string key = strip(line.substr(0, eq));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
        if (!table.empty()) key = table + "." + key;
        const std::string value = strip(line.substr(eq + 1));
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw ConfigError("unterminated array at line " + std::to_string(line_no));
            doc.arrays_[key] = parse_array(value.substr(1, value.size() - 2), line_no);
        } else {
            doc.scalars_[key] = parse_scalar(value, line_no);
        }
    }
    return doc;
}

TomlLite TomlLite::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const TomlLite::Value* TomlLite::find(const std::string& key) const {
    auto it = scalars_.find(key);
    return it == scalars_.end() ? nullptr : &it->second;
}

std::int64_t TomlLite::get_int(const std::string& key, std::int64_t fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
    throw ConfigError("expected integer for " + key);
}

double TomlLite::get_double(const std::string& key, double fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (const auto* d = std::get_if<double>(v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    throw ConfigError("expected number for " + key);
}

bool TomlLite::get_bool(const std::string& key, bool fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (const auto* b = std::get_if<bool>(v)) return *b;
    throw ConfigError("expected boolean for " + key);
}

std::string TomlLite::get_string(const std::string& key, const std::string& fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (const auto* s = std::get_if<std::string>(v)) return *s;
    throw ConfigError("expected string for " + key);
}

std::vector<std::int64_t> TomlLite::get_int_array(const std::string& key,
                                                  std::vector<std::int64_t> fallback) const {
    auto it = arrays_.find(key);
    if (it == arrays_.end()) return fallback;
    std::vector<std::int64_t> out;
    for (const Value& v : it->second) {
        if (const auto* i = std::get_if<std::int64_t>(&v)) out.push_back(*i);
        else throw ConfigError("expected integer array for " + key);
    }
    return out;
}

std::vector<std::string> TomlLite::get_string_array(const std::string& key,
                                                    std::vector<std::string> fallback) const {
    auto it = arrays_.find(key);
    if (it == arrays_.end()) return fallback;
    std::vector<std::string> out;
    for (const Value& v : it->second) {
        if (const auto* s = std::get_if<std::string>(&v)) out.push_back(*s);
        else throw ConfigError("expected string array for " + key);
    }
    return out;
}

}  // namespace rallnet
