#pragma once

#include "tripcast/labels.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace tripcast {

// Map f from offline labels to online labels. An empty target is Unmapped.
class StateMap
{
public:
    StateMap() = default;
    explicit StateMap(std::map<ClusterLabel, std::optional<ClusterLabel>> f);

    static StateMap identity(std::span<const ClusterLabel> labels);

    std::optional<ClusterLabel> target(ClusterLabel offline) const;
    // Number of offline labels sharing the image of `offline`; 0 when Unmapped
    // or unknown.
    int multiplicity(ClusterLabel offline) const;

    const std::map<ClusterLabel, std::optional<ClusterLabel>>& entries() const { return f_; }
    bool operator==(const StateMap&) const = default;

private:
    std::map<ClusterLabel, std::optional<ClusterLabel>> f_;
    std::map<ClusterLabel, int> image_count_;
};

// Plurality map over the same trips: each offline label goes to the online
// label holding most of its members (ties to the smaller label). A plurality
// of online Outlier leaves it Unmapped; offline Outlier always maps to
// Outlier.
StateMap build_state_map(std::span<const ClusterLabel> offline_labels, std::span<const ClusterLabel> online_labels);

struct HellingerSplit
{
    double h2{ 0.0 };
    double h2_d{ 0.0 };
    double h2_s{ 0.0 };
    // Predicted mass on online labels outside the image of f.
    double orphan_mass{ 0.0 };
};

// Squared Hellinger distance across cluster spaces and its split into the
// distributional part and the state-space remainder. Throws
// std::invalid_argument when either input does not sum to 1 within 1e-9.
HellingerSplit hellinger_split(const Distribution& p_star, const Distribution& p_i, const StateMap& map);

struct RegretStep
{
    Distribution p_star;
    Distribution p_i;
    StateMap map;
};

struct RegretRecord
{
    std::size_t step{ 0 };
    double h2{ 0.0 };
    double h2_d{ 0.0 };
    double h2_s{ 0.0 };
    double cum_regret{ 0.0 };
    double cum_h2_d{ 0.0 };
    double cum_h2_s{ 0.0 };
    double orphan_mass{ 0.0 };
};

std::vector<RegretRecord> regret_curve(std::span<const RegretStep> steps);

// Appends one step to a running curve.
RegretRecord accumulate(const std::vector<RegretRecord>& curve, std::size_t step, const HellingerSplit& split);

} // namespace tripcast
