#pragma once

#include "tripcast/ingest.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tripcast {

// Unreadable file or unexpected header. Bad data rows are skipped instead.
class CsvError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kFixHeader = "user_id,t,lat,lon,speed_kmh";
inline constexpr std::string_view kTripHeader = "user_id,t_start,t_end,src_lat,src_lon,dst_lat,dst_lon,dist_m,dur_s";

template <typename T>
struct CsvRead
{
    T rows;
    std::size_t skipped{ 0 };
};

CsvRead<std::vector<GpsFix>> read_fixes(std::istream& in);
CsvRead<std::vector<GpsFix>> read_fixes(const std::filesystem::path& path);

// Trips are grouped per user and stably sorted by start time.
CsvRead<Corpus> read_trips(std::istream& in);
CsvRead<Corpus> read_trips(const std::filesystem::path& path);

void write_trips(std::ostream& out, const Corpus& corpus);
void write_trips(const std::filesystem::path& path, const Corpus& corpus);

// Shortest round-trip representation; identical inputs give identical text.
std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);

std::vector<std::string> split_csv_line(std::string_view line);

} // namespace tripcast
