#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

namespace tripcast {

// Flat `key = value` text: one pair per line, `#` starts a comment, blank
// lines are ignored. Later assignments override earlier ones.
class KeyValues
{
public:
    KeyValues() = default;

    static KeyValues parse(std::istream& in);
    static KeyValues load(const std::filesystem::path& path);

    // Accepts "key=value"; throws std::invalid_argument otherwise.
    void set_from_assignment(const std::string& assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool contains(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace tripcast
