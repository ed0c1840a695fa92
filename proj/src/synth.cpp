#include "tripcast/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tripcast {

namespace {

GeoPoint uniform_in_disc(const GeoPoint& center, double radius_m, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = radius_m * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    return offset_by_meters(center, r * std::cos(theta), r * std::sin(theta));
}

GeoPoint add_noise(const GeoPoint& p, double sigma_m, std::mt19937_64& rng)
{
    if (sigma_m <= 0.0) {
        return p;
    }
    std::normal_distribution<double> noise(0.0, sigma_m);
    const double east = noise(rng);
    const double north = noise(rng);
    return offset_by_meters(p, east, north);
}

std::vector<double> dirichlet_row(int k, double concentration, std::mt19937_64& rng)
{
    std::gamma_distribution<double> gamma(concentration, 1.0);
    std::vector<double> row(static_cast<std::size_t>(k));
    double total = 0.0;
    for (auto& v : row) {
        v = gamma(rng);
        total += v;
    }
    if (total <= 0.0) {
        std::ranges::fill(row, 1.0 / k);
        return row;
    }
    for (auto& v : row) {
        v /= total;
    }
    return row;
}

std::vector<GeoPoint> place_locations(const SynthSpec& spec, std::mt19937_64& rng)
{
    const GeoPoint center{ spec.area_lat, spec.area_lon };
    const double radius_m = spec.area_radius_km * 1000.0;
    std::vector<GeoPoint> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < spec.k_true) {
        if (++attempts > 100000) {
            throw std::invalid_argument("cannot place k_true locations with the requested separation");
        }
        const auto candidate = uniform_in_disc(center, radius_m, rng);
        bool far_enough = true;
        for (const auto& p : out) {
            if (haversine_distance(p, candidate) < spec.min_separation_m) {
                far_enough = false;
                break;
            }
        }
        if (far_enough) {
            out.push_back(candidate);
        }
    }
    return out;
}

} // namespace

SynthSpec SynthSpec::from_key_values(const KeyValues& kv)
{
    static const std::set<std::string> known = {
        "users", "k_true", "noise_m", "outlier_prob", "trips_per_user", "area_lat", "area_lon", "area_radius_km",
        "seed", "transitions", "transition_concentration", "min_separation_m", "trips_per_day", "start_time",
    };
    for (const auto& [key, value] : kv.entries()) {
        if (!known.contains(key)) {
            throw std::invalid_argument("unknown synthetic spec key '" + key + "'");
        }
    }
    SynthSpec s;
    s.users = static_cast<int>(kv.get_int("users", s.users));
    s.k_true = static_cast<int>(kv.get_int("k_true", s.k_true));
    s.noise_m = kv.get_double("noise_m", s.noise_m);
    s.outlier_prob = kv.get_double("outlier_prob", s.outlier_prob);
    s.trips_per_user = static_cast<int>(kv.get_int("trips_per_user", s.trips_per_user));
    s.area_lat = kv.get_double("area_lat", s.area_lat);
    s.area_lon = kv.get_double("area_lon", s.area_lon);
    s.area_radius_km = kv.get_double("area_radius_km", s.area_radius_km);
    s.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(s.seed)));
    const auto kind = kv.get_string("transitions", "random");
    if (kind == "uniform") {
        s.transitions = TransitionKind::Uniform;
    } else if (kind == "random") {
        s.transitions = TransitionKind::Random;
    } else {
        throw std::invalid_argument("transitions must be 'uniform' or 'random', got '" + kind + "'");
    }
    s.transition_concentration = kv.get_double("transition_concentration", s.transition_concentration);
    s.min_separation_m = kv.get_double("min_separation_m", s.min_separation_m);
    s.trips_per_day = kv.get_double("trips_per_day", s.trips_per_day);
    s.start_time = kv.get_double("start_time", s.start_time);
    if (s.users < 0 || s.k_true < 1 || s.trips_per_user < 0 || s.noise_m < 0.0 || s.outlier_prob < 0.0 || s.outlier_prob > 1.0 ||
        s.area_radius_km <= 0.0 || s.trips_per_day <= 0.0 || s.transition_concentration <= 0.0) {
        throw std::invalid_argument("synthetic spec has out-of-range values");
    }
    return s;
}

void SynthUserSpec::validate() const
{
    if (locations.empty()) {
        throw std::invalid_argument("synthetic user needs at least one location");
    }
    if (transition.size() != locations.size()) {
        throw std::invalid_argument("transition matrix must have one row per location");
    }
    for (const auto& row : transition) {
        if (row.size() != locations.size()) {
            throw std::invalid_argument("transition matrix must be square");
        }
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0)) {
                throw std::invalid_argument("transition probabilities must be non-negative");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("transition row does not sum to 1");
        }
    }
    if (outlier_prob < 0.0 || outlier_prob > 1.0 || noise_m < 0.0 || trips < 0 || trips_per_day <= 0.0) {
        throw std::invalid_argument("synthetic user spec has out-of-range values");
    }
}

std::vector<Trip> generate_user(const std::string& user_id, const SynthUserSpec& spec, std::mt19937_64& rng,
                                SynthUserTruth* truth)
{
    spec.validate();
    const int k = static_cast<int>(spec.locations.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick_location(0, k - 1);
    std::uniform_real_distribution<double> duration_s(300.0, 2400.0);
    const double mean_gap = 86400.0 / spec.trips_per_day;
    std::uniform_real_distribution<double> gap_s(0.2 * mean_gap, 1.8 * mean_gap);

    std::vector<std::discrete_distribution<int>> next_state;
    next_state.reserve(spec.transition.size());
    for (const auto& row : spec.transition) {
        next_state.emplace_back(row.begin(), row.end());
    }

    if (truth) {
        truth->locations = spec.locations;
        truth->transition = spec.transition;
        truth->labels.clear();
    }

    int state = pick_location(rng);
    GeoPoint previous = add_noise(spec.locations[static_cast<std::size_t>(state)], spec.noise_m, rng);
    double clock = spec.start_time;

    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(spec.trips));
    for (int i = 0; i < spec.trips; ++i) {
        Trip trip;
        trip.user_id = user_id;
        trip.t_start = clock + gap_s(rng);
        trip.duration_s = duration_s(rng);
        trip.t_end = trip.t_start + trip.duration_s;
        trip.duration_s = trip.t_end - trip.t_start;
        trip.source = previous;

        int label = -1;
        if (spec.outlier_prob > 0.0 && unit(rng) < spec.outlier_prob) {
            trip.dest = uniform_in_disc(spec.area_center, spec.area_radius_m, rng);
        } else {
            state = next_state[static_cast<std::size_t>(state)](rng);
            label = state;
            trip.dest = add_noise(spec.locations[static_cast<std::size_t>(state)], spec.noise_m, rng);
        }
        trip.distance_m = haversine_distance(trip.source, trip.dest);

        previous = trip.dest;
        clock = trip.t_end;
        trips.push_back(std::move(trip));
        if (truth) {
            truth->labels.push_back(label);
        }
    }
    return trips;
}

SynthCorpus generate_synthetic(const SynthSpec& spec, std::uint64_t seed)
{
    if (spec.k_true < 1) {
        throw std::invalid_argument("k_true must be at least 1");
    }
    SynthCorpus out;
    for (int u = 0; u < spec.users; ++u) {
        std::seed_seq seq{ static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(u) };
        std::mt19937_64 rng(seq);

        SynthUserSpec user;
        user.locations = place_locations(spec, rng);
        for (int row = 0; row < spec.k_true; ++row) {
            if (spec.transitions == TransitionKind::Uniform) {
                user.transition.emplace_back(static_cast<std::size_t>(spec.k_true), 1.0 / spec.k_true);
            } else {
                user.transition.push_back(dirichlet_row(spec.k_true, spec.transition_concentration, rng));
            }
        }
        user.noise_m = spec.noise_m;
        user.outlier_prob = spec.outlier_prob;
        user.trips = spec.trips_per_user;
        user.area_center = { spec.area_lat, spec.area_lon };
        user.area_radius_m = spec.area_radius_km * 1000.0;
        user.trips_per_day = spec.trips_per_day;
        user.start_time = spec.start_time;

        char id[32];
        std::snprintf(id, sizeof id, "u%04d", u);
        SynthUserTruth truth;
        auto trips = generate_user(id, user, rng, &truth);
        out.trips.emplace(id, std::move(trips));
        out.truth.emplace(id, std::move(truth));
    }
    return out;
}

nlohmann::json truth_to_json(const SynthCorpus& corpus)
{
    nlohmann::json users = nlohmann::json::object();
    for (const auto& [user, truth] : corpus.truth) {
        nlohmann::json locations = nlohmann::json::array();
        for (const auto& p : truth.locations) {
            locations.push_back({ p.lat, p.lon });
        }
        users[user] = { { "locations", locations }, { "transition", truth.transition }, { "labels", truth.labels } };
    }
    return { { "users", users } };
}

} // namespace tripcast
