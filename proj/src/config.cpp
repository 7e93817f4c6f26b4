#include "longtail/config.hpp"

#include <charconv>
#include <sstream>

#include "longtail/errors.hpp"
#include "longtail/text.hpp"

namespace longtail {

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    return parse_text(read_file(path), path);
}

KeyValueFile KeyValueFile::parse_text(const std::string& text, const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected key=value, got '" + stripped + "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (kv.values_.count(key) != 0) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        }
        kv.values_[key] = value;
        kv.consumed_[key] = false;
    }
    return kv;
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) != 0; }

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    return it->second;
}

double KeyValueFile::get_double(const std::string& key, double fallback) {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    try {
        return parse_double(it->second, origin_ + ": key '" + key + "'");
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    const std::string& text = it->second;
    std::uint64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end || text.empty()) {
        throw ConfigError(origin_ + ": key '" + key + "': not an unsigned integer: '" +
                          text + "'");
    }
    return value;
}

std::size_t KeyValueFile::get_size(const std::string& key, std::size_t fallback) {
    return static_cast<std::size_t>(get_u64(key, fallback));
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_[key] = true;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw ConfigError(origin_ + ": key '" + key + "': expected true|false, got '" +
                      it->second + "'");
}

void KeyValueFile::reject_unknown_keys() const {
    for (const auto& [key, used] : consumed_) {
        if (!used) {
            throw ConfigError(origin_ + ": unknown key '" + key + "'");
        }
    }
}

} // namespace longtail
