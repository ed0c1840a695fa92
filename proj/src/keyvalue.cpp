#include "tripcast/keyvalue.hpp"

#include <charconv>
#include <limits>
#include <fstream>
#include <stdexcept>

namespace tripcast {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* kind)
{
    throw std::invalid_argument("key '" + key + "': expected " + kind + ", got '" + value + "'");
}

} // namespace

KeyValues KeyValues::parse(std::istream& in)
{
    KeyValues kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
        }
        kv.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return parse(in);
}

void KeyValues::set_from_assignment(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
        throw std::invalid_argument("expected key=value, got '" + assignment + "'");
    }
    values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::optional<std::string> KeyValues::get(const std::string& key) const
{
    if (auto it = values_.find(key); it != values_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const
{
    return get(key).value_or(fallback);
}

double KeyValues::get_double(const std::string& key, double fallback) const
{
    const auto v = get(key);
    if (!v) {
        return fallback;
    }
    if (*v == "inf" || *v == "infinity") {
        return std::numeric_limits<double>::infinity();
    }
    double out = 0.0;
    const auto* end = v->data() + v->size();
    auto [ptr, ec] = std::from_chars(v->data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        bad_value(key, *v, "a number");
    }
    return out;
}

long long KeyValues::get_int(const std::string& key, long long fallback) const
{
    const auto v = get(key);
    if (!v) {
        return fallback;
    }
    long long out = 0;
    const auto* end = v->data() + v->size();
    auto [ptr, ec] = std::from_chars(v->data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        bad_value(key, *v, "an integer");
    }
    return out;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const
{
    const auto v = get(key);
    if (!v) {
        return fallback;
    }
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
        return true;
    }
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
        return false;
    }
    bad_value(key, *v, "a boolean");
}

} // namespace tripcast
