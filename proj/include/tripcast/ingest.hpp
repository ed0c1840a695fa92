#pragma once

#include "tripcast/geo.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tripcast {

struct GpsFix
{
    std::string user_id;
    double t{ 0.0 }; // unix seconds
    GeoPoint pos;
    std::optional<double> speed_kmh;
};

struct Trip
{
    std::string user_id;
    double t_start{ 0.0 };
    double t_end{ 0.0 };
    GeoPoint source;
    GeoPoint dest;
    double distance_m{ 0.0 };
    double duration_s{ 0.0 };

    bool operator==(const Trip&) const = default;
};

// Trips per user, each sequence ordered by time. Users iterate in id order.
using Corpus = std::map<std::string, std::vector<Trip>>;

enum class DistanceMode
{
    Polyline,
    StraightLine,
};

struct TripExtractionOptions
{
    double fix_gap_s{ 300.0 };      // an inter-fix gap above this ends a trip (loss of fixation)
    double stop_speed_kmh{ 0.1 };   // below this a fix counts as stationary
    double stop_duration_s{ 600.0 }; // a stationary run this long ends a trip
    double merge_gap_s{ 10.0 };     // trips closer than this are merged
    DistanceMode distance_mode{ DistanceMode::Polyline };
};

// Splits one user's time-ordered fixes into trips. A trip ends at a fixation
// gap, or at the first fix of a stationary run lasting at least
// `stop_duration_s`; the next trip then starts at the run's last fix.
// Trips separated by less than `merge_gap_s` are merged afterwards.
// Throws std::invalid_argument if the fixes are not sorted by time.
std::vector<Trip> extract_trips(std::span<const GpsFix> fixes, const TripExtractionOptions& options = {});

// Merges consecutive trips whose gap is below `options.merge_gap_s`: the
// merged trip keeps the first source and the second destination.
std::vector<Trip> merge_close_trips(std::span<const Trip> trips, const TripExtractionOptions& options = {});

struct CorpusFilterOptions
{
    double min_distance_m{ 100.0 };
    double min_duration_s{ 240.0 };
    double min_span_days{ 30.0 };
    double min_trips_per_day{ 1.0 };
};

// Drops short trips, then users with too short or too sparse a history.
// Idempotent.
Corpus filter_corpus(const Corpus& corpus, const CorpusFilterOptions& options = {});

// Groups fixes by user; each user's fixes are stably sorted by time.
std::map<std::string, std::vector<GpsFix>> group_fixes_by_user(std::span<const GpsFix> fixes);

std::size_t trip_count(const Corpus& corpus);

} // namespace tripcast
