#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rallnet {

// Minimal TOML reader covering what the experiment config needs: [tables],
// key = value with integers, floats, booleans, quoted strings, and flat
// arrays of those. Keys are exposed flattened as "table.key".
class TomlLite {
  public:
    using Value = std::variant<std::int64_t, double, bool, std::string>;

    static TomlLite parse(const std::string& text);
    static TomlLite parse_file(const std::string& path);

    bool has(const std::string& key) const { return scalars_.count(key) || arrays_.count(key); }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    std::vector<std::int64_t> get_int_array(const std::string& key,
                                            std::vector<std::int64_t> fallback) const;
    std::vector<std::string> get_string_array(const std::string& key,
                                              std::vector<std::string> fallback) const;

  private:
    const Value* find(const std::string& key) const;

    std::map<std::string, Value> scalars_;
    std::map<std::string, std::vector<Value>> arrays_;
};

}  // namespace rallnet
