#pragma once

#include "tripcast/geo.hpp"
#include "tripcast/ingest.hpp"
#include "tripcast/keyvalue.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace tripcast {

enum class TransitionKind
{
    Uniform,
    Random, // rows drawn from a symmetric Dirichlet
};

// Corpus-level generator settings, readable from a flat key=value file.
struct SynthSpec
{
    int users{ 10 };
    int k_true{ 4 };
    double noise_m{ 20.0 };
    double outlier_prob{ 0.1 };
    int trips_per_user{ 200 };
    double area_lat{ 57.7089 };
    double area_lon{ 11.9746 };
    double area_radius_km{ 15.0 };
    std::uint64_t seed{ 1 };

    TransitionKind transitions{ TransitionKind::Random };
    double transition_concentration{ 0.5 };
    double min_separation_m{ 1000.0 };
    double trips_per_day{ 2.0 };
    double start_time{ 1.6e9 };

    static SynthSpec from_key_values(const KeyValues& kv);
};

// Everything needed to generate one user's trips.
struct SynthUserSpec
{
    std::vector<GeoPoint> locations;
    std::vector<std::vector<double>> transition; // row-stochastic, locations x locations
    double noise_m{ 0.0 };
    double outlier_prob{ 0.0 };
    int trips{ 0 };
    GeoPoint area_center;
    double area_radius_m{ 10000.0 };
    double trips_per_day{ 2.0 };
    double start_time{ 1.6e9 };

    // Throws std::invalid_argument for an empty location set, a non-square
    // matrix, or a row not summing to 1 within 1e-9.
    void validate() const;
};

struct SynthUserTruth
{
    std::vector<GeoPoint> locations;
    std::vector<std::vector<double>> transition;
    std::vector<int> labels; // planted location index per trip, -1 for outlier trips
};

struct SynthCorpus
{
    Corpus trips;
    std::map<std::string, SynthUserTruth> truth;
};

// Sources chain from the previous destination; destinations are planted
// locations plus isotropic Gaussian noise in the local tangent plane, or a
// uniform point in the area for outlier trips.
std::vector<Trip> generate_user(const std::string& user_id, const SynthUserSpec& spec, std::mt19937_64& rng,
                                SynthUserTruth* truth = nullptr);

// Deterministic for a given (spec, seed).
SynthCorpus generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

nlohmann::json truth_to_json(const SynthCorpus& corpus);

} // namespace tripcast
