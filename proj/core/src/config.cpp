#include "twomem/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twomem {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, const std::string& origin) {
    KeyValueConfig config;
    config.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (config.values_.count(key)) {
            throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                        ": duplicate key '" + key + "'");
        }
        config.values_[key] = value;
    }
    return config;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path);
}

std::optional<std::string> KeyValueConfig::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
    const auto raw = get_string(key);
    if (!raw) return std::nullopt;
    try {
        std::size_t used = 0;
        const double value = std::stod(*raw, &used);
        if (used != raw->size()) throw std::invalid_argument("");
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument(origin_ + ": key '" + key + "' is not a number: " + *raw);
    }
}

std::optional<std::int64_t> KeyValueConfig::get_int(const std::string& key) const {
    const auto raw = get_string(key);
    if (!raw) return std::nullopt;
    try {
        std::size_t used = 0;
        const std::int64_t value = std::stoll(*raw, &used);
        if (used != raw->size()) throw std::invalid_argument("");
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument(origin_ + ": key '" + key + "' is not an integer: " + *raw);
    }
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
    const auto raw = get_string(key);
    if (!raw) return std::nullopt;
    if (*raw == "true" || *raw == "1" || *raw == "on") return true;
    if (*raw == "false" || *raw == "0" || *raw == "off") return false;
    throw std::invalid_argument(origin_ + ": key '" + key + "' is not a boolean: " + *raw);
}

std::optional<std::vector<std::uint64_t>> KeyValueConfig::get_uint_list(
    const std::string& key) const {
    const auto raw = get_string(key);
    if (!raw) return std::nullopt;
    std::vector<std::uint64_t> values;
    std::string piece;
    std::istringstream in(*raw);
    while (std::getline(in, piece, ',')) {
        piece = trim(piece);
        if (piece.empty()) continue;
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(piece, &used);
            if (used != piece.size()) throw std::invalid_argument("");
            values.push_back(v);
        } catch (const std::exception&) {
            throw std::invalid_argument(origin_ + ": key '" + key +
                                        "' has a bad list element: " + piece);
        }
    }
    return values;
}

std::vector<std::string> KeyValueConfig::unconsumed_keys() const {
    std::vector<std::string> keys;
    for (const auto& [key, value] : values_) {
        if (!consumed_.count(key)) keys.push_back(key);
    }
    return keys;
}

} // namespace twomem
