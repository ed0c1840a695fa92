#include "tripcast/csv_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace tripcast {

namespace {

std::string_view strip_cr(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

void expect_header(std::istream& in, std::string_view header)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvError("missing header, expected '" + std::string(header) + "'");
    }
    if (strip_cr(line) != header) {
        throw CsvError("malformed header '" + line + "', expected '" + std::string(header) + "'");
    }
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw CsvError("cannot open " + path.string());
    }
    return in;
}

std::optional<GpsFix> parse_fix(std::string_view line)
{
    const auto f = split_csv_line(line);
    if (f.size() != 5 || f[0].empty()) {
        return std::nullopt;
    }
    const auto t = parse_double(f[1]);
    const auto lat = parse_double(f[2]);
    const auto lon = parse_double(f[3]);
    if (!t || !lat || !lon) {
        return std::nullopt;
    }
    GpsFix fix{ f[0], *t, { *lat, *lon }, std::nullopt };
    if (!fix.pos.is_valid()) {
        return std::nullopt;
    }
    if (!f[4].empty()) {
        fix.speed_kmh = parse_double(f[4]);
        if (!fix.speed_kmh || *fix.speed_kmh < 0.0) {
            return std::nullopt;
        }
    }
    return fix;
}

std::optional<Trip> parse_trip(std::string_view line)
{
    const auto f = split_csv_line(line);
    if (f.size() != 9 || f[0].empty()) {
        return std::nullopt;
    }
    std::array<double, 8> v{};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto x = parse_double(f[i + 1]);
        if (!x) {
            return std::nullopt;
        }
        v[i] = *x;
    }
    Trip trip{ f[0], v[0], v[1], { v[2], v[3] }, { v[4], v[5] }, v[6], v[7] };
    if (!trip.source.is_valid() || !trip.dest.is_valid() || trip.t_end <= trip.t_start || trip.distance_m < 0.0) {
        return std::nullopt;
    }
    return trip;
}

} // namespace

std::vector<std::string> split_csv_line(std::string_view line)
{
    line = strip_cr(line);
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

CsvRead<std::vector<GpsFix>> read_fixes(std::istream& in)
{
    expect_header(in, kFixHeader);
    CsvRead<std::vector<GpsFix>> result;
    std::string line;
    while (std::getline(in, line)) {
        if (strip_cr(line).empty()) {
            continue;
        }
        if (auto fix = parse_fix(line)) {
            result.rows.push_back(std::move(*fix));
        } else {
            ++result.skipped;
        }
    }
    return result;
}

CsvRead<std::vector<GpsFix>> read_fixes(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_fixes(in);
}

CsvRead<Corpus> read_trips(std::istream& in)
{
    expect_header(in, kTripHeader);
    CsvRead<Corpus> result;
    std::string line;
    while (std::getline(in, line)) {
        if (strip_cr(line).empty()) {
            continue;
        }
        if (auto trip = parse_trip(line)) {
            result.rows[trip->user_id].push_back(std::move(*trip));
        } else {
            ++result.skipped;
        }
    }
    for (auto& [user, trips] : result.rows) {
        std::ranges::stable_sort(trips, {}, &Trip::t_start);
    }
    return result;
}

CsvRead<Corpus> read_trips(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_trips(in);
}

void write_trips(std::ostream& out, const Corpus& corpus)
{
    out << kTripHeader << '\n';
    for (const auto& [user, trips] : corpus) {
        for (const auto& t : trips) {
            out << t.user_id << ',' << format_number(t.t_start) << ',' << format_number(t.t_end) << ','
                << format_number(t.source.lat) << ',' << format_number(t.source.lon) << ','
                << format_number(t.dest.lat) << ',' << format_number(t.dest.lon) << ','
                << format_number(t.distance_m) << ',' << format_number(t.duration_s) << '\n';
        }
    }
}

void write_trips(const std::filesystem::path& path, const Corpus& corpus)
{
    std::ofstream out(path);
    if (!out) {
        throw CsvError("cannot write " + path.string());
    }
    write_trips(out, corpus);
}

std::string format_number(double value)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf.data(), ptr);
}

std::string format_optional(const std::optional<double>& value)
{
    return value ? format_number(*value) : std::string{};
}

} // namespace tripcast
