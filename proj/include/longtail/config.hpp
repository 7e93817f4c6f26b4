#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace longtail {

// Flat key=value text: one pair per line, `#` comments, blank lines ignored.
// Lookups mark keys as consumed so callers can reject typos wholesale.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    std::size_t get_size(const std::string& key, std::size_t fallback);
    bool get_bool(const std::string& key, bool fallback); // true|false

    // Throws ConfigError naming any key never consumed.
    void reject_unknown_keys() const;

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> consumed_;
};

} // namespace longtail
