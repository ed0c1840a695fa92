#pragma once

#include "tripcast/prediction.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>

#include <nlohmann/json_fwd.hpp>

namespace tripcast {

// Cumulative 0/1 reward and number of awake steps of one expert.
struct ExpertTally
{
    std::int64_t z{ 0 };
    std::int64_t n{ 0 };
    bool operator==(const ExpertTally&) const = default;
};

// Sleeping experts over destination labels: expert k always predicts k and
// stays awake once it has appeared.
class ExpertPool
{
public:
    void add_expert(ClusterLabel label);
    bool contains(ClusterLabel label) const { return tallies_.contains(label); }

    // Experts merge with z summed and n the maximum (same steps, disjoint rewards).
    void merge(std::span<const ClusterLabel> sources, ClusterLabel survivor);

    // Pools over disjoint step sets combine with both z and n summed.
    void absorb(const ExpertPool& other);

    // Every expert is awake one more step; the one matching `actual` earns 1.
    void reward(ClusterLabel actual);

    // Follow-the-awake-leader: highest z/n among non-Outlier experts with
    // n > 0; ties go to larger z, then the smaller label.
    std::optional<ClusterLabel> leader() const;

    // (z + kappa) / (n + kappa * size), normalized over all experts.
    Distribution smoothed_distribution(double kappa) const;

    const std::map<ClusterLabel, ExpertTally>& tallies() const { return tallies_; }

    bool operator==(const ExpertPool&) const = default;

private:
    std::map<ClusterLabel, ExpertTally> tallies_;
};

struct ExpertOptions
{
    double smoothing{ 1.0 };
    // When no expert is eligible, play a uniformly random non-Outlier expert
    // instead of abstaining.
    bool random_fallback{ false };
    std::uint64_t seed{ 0 };
};

// One pool over all trips plus one pool per source label.
class ExpertModel
{
public:
    explicit ExpertModel(ExpertOptions options = {});

    Prediction predict(ClusterLabel source) const;
    void update(ClusterLabel source, ClusterLabel actual, std::span<const ClusterEvent> events = {});
    void apply_events(std::span<const ClusterEvent> events);

    const ExpertPool& global() const { return global_; }
    const std::map<ClusterLabel, ExpertPool>& conditionals() const { return conditionals_; }

    nlohmann::json to_json() const;

private:
    const ExpertPool& pool_for(ClusterLabel source) const;
    void add_label(ClusterLabel label);

    ExpertOptions options_;
    ExpertPool global_;
    std::map<ClusterLabel, ExpertPool> conditionals_;
    mutable std::mt19937_64 rng_;
};

nlohmann::json to_json(const ExpertPool& pool);

} // namespace tripcast
