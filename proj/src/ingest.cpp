#include "tripcast/ingest.hpp"

#include <algorithm>
#include <stdexcept>

namespace tripcast {

namespace {

constexpr double kSecondsPerDay = 86400.0;

// Reported speed when present; otherwise the displacement rate towards the
// next fix (the previous one for the final fix).
std::vector<double> effective_speeds(std::span<const GpsFix> fixes)
{
    std::vector<double> speeds(fixes.size(), 0.0);
    const auto rate = [&](std::size_t from, std::size_t to) -> std::optional<double> {
        const double dt = fixes[to].t - fixes[from].t;
        if (dt <= 0.0) {
            return std::nullopt;
        }
        return haversine_distance(fixes[from].pos, fixes[to].pos) / dt * 3.6;
    };
    for (std::size_t i = 0; i < fixes.size(); ++i) {
        if (fixes[i].speed_kmh) {
            speeds[i] = *fixes[i].speed_kmh;
            continue;
        }
        std::optional<double> v;
        if (i + 1 < fixes.size()) {
            v = rate(i, i + 1);
        }
        if (!v && i > 0) {
            v = rate(i - 1, i);
        }
        // Duplicate timestamps carry the previous estimate forward.
        speeds[i] = v.value_or(i > 0 ? speeds[i - 1] : 0.0);
    }
    return speeds;
}

Trip make_trip(std::span<const GpsFix> fixes, std::size_t first, std::size_t last, DistanceMode mode)
{
    Trip trip;
    trip.user_id = fixes[first].user_id;
    trip.t_start = fixes[first].t;
    trip.t_end = fixes[last].t;
    trip.source = fixes[first].pos;
    trip.dest = fixes[last].pos;
    trip.duration_s = trip.t_end - trip.t_start;
    if (mode == DistanceMode::Polyline) {
        for (std::size_t i = first; i < last; ++i) {
            trip.distance_m += haversine_distance(fixes[i].pos, fixes[i + 1].pos);
        }
    } else {
        trip.distance_m = haversine_distance(trip.source, trip.dest);
    }
    return trip;
}

} // namespace

std::vector<Trip> extract_trips(std::span<const GpsFix> fixes, const TripExtractionOptions& options)
{
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        if (fixes[i].t < fixes[i - 1].t) {
            throw std::invalid_argument("extract_trips: fixes are not sorted by time");
        }
    }
    if (fixes.size() < 2) {
        return {};
    }

    const auto speeds = effective_speeds(fixes);
    const auto slow = [&](std::size_t i) { return speeds[i] < options.stop_speed_kmh; };

    std::vector<Trip> trips;
    const auto emit = [&](std::size_t first, std::size_t last) {
        if (last > first && fixes[last].t > fixes[first].t) {
            trips.push_back(make_trip(fixes, first, last, options.distance_mode));
        }
    };

    std::size_t seg_begin = 0;
    while (seg_begin < fixes.size()) {
        std::size_t seg_end = seg_begin;
        while (seg_end + 1 < fixes.size() && fixes[seg_end + 1].t - fixes[seg_end].t <= options.fix_gap_s) {
            ++seg_end;
        }

        std::size_t trip_begin = seg_begin;
        std::size_t i = seg_begin;
        while (i <= seg_end) {
            if (!slow(i)) {
                ++i;
                continue;
            }
            std::size_t run_end = i;
            while (run_end + 1 <= seg_end && slow(run_end + 1)) {
                ++run_end;
            }
            if (fixes[run_end].t - fixes[i].t >= options.stop_duration_s) {
                emit(trip_begin, i);
                trip_begin = run_end;
            }
            i = run_end + 1;
        }
        emit(trip_begin, seg_end);
        seg_begin = seg_end + 1;
    }
    return merge_close_trips(trips, options);
}

std::vector<Trip> merge_close_trips(std::span<const Trip> trips, const TripExtractionOptions& options)
{
    std::vector<Trip> out;
    for (const auto& trip : trips) {
        if (!out.empty() && trip.t_start - out.back().t_end < options.merge_gap_s) {
            auto& prev = out.back();
            if (options.distance_mode == DistanceMode::Polyline) {
                prev.distance_m += haversine_distance(prev.dest, trip.source) + trip.distance_m;
            } else {
                prev.distance_m = haversine_distance(prev.source, trip.dest);
            }
            prev.dest = trip.dest;
            prev.t_end = trip.t_end;
            prev.duration_s = prev.t_end - prev.t_start;
        } else {
            out.push_back(trip);
        }
    }
    return out;
}

Corpus filter_corpus(const Corpus& corpus, const CorpusFilterOptions& options)
{
    Corpus out;
    for (const auto& [user, trips] : corpus) {
        std::vector<Trip> kept;
        for (const auto& trip : trips) {
            if (trip.distance_m >= options.min_distance_m && trip.duration_s >= options.min_duration_s) {
                kept.push_back(trip);
            }
        }
        if (kept.empty()) {
            continue;
        }
        const double span_days = (kept.back().t_end - kept.front().t_start) / kSecondsPerDay;
        if (span_days < options.min_span_days) {
            continue;
        }
        if (static_cast<double>(kept.size()) / span_days < options.min_trips_per_day) {
            continue;
        }
        out.emplace(user, std::move(kept));
    }
    return out;
}

std::map<std::string, std::vector<GpsFix>> group_fixes_by_user(std::span<const GpsFix> fixes)
{
    std::map<std::string, std::vector<GpsFix>> out;
    for (const auto& fix : fixes) {
        out[fix.user_id].push_back(fix);
    }
    for (auto& [user, list] : out) {
        std::ranges::stable_sort(list, {}, &GpsFix::t);
    }
    return out;
}

std::size_t trip_count(const Corpus& corpus)
{
    std::size_t n = 0;
    for (const auto& [user, trips] : corpus) {
        n += trips.size();
    }
    return n;
}

} // namespace tripcast
