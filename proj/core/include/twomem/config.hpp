#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace twomem {

// Flat "section.key = value" config text. '#' starts a comment; blank lines
// are ignored. Typed getters record which keys were consumed so unknown keys
// can be reported as validation errors.
class KeyValueConfig {
public:
    static KeyValueConfig parse_text(const std::string& text, const std::string& origin);
    static KeyValueConfig parse_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    std::optional<std::vector<std::uint64_t>> get_uint_list(const std::string& key) const;

    // Keys present in the file but never consumed by a getter.
    std::vector<std::string> unconsumed_keys() const;
    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

} // namespace twomem
