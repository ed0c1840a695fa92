#pragma once

#include "tripcast/labels.hpp"

#include <map>
#include <optional>
#include <span>

namespace tripcast {

// Posterior pseudocounts (observed counts plus prior) of a categorical over
// cluster labels. Event probabilities are the normalized pseudocounts.
// Priors and counts are kept apart, so the posterior does not depend on the
// order in which observations arrive.
class DirichletCategorical
{
public:
    DirichletCategorical() = default;

    // Adds `label` with `prior` mass and `count` observations; no-op if the
    // label exists.
    void add_label(ClusterLabel label, double prior, double count = 0.0);
    bool contains(ClusterLabel label) const { return cells_.contains(label); }

    // Throws std::out_of_range for an unknown label.
    void observe(ClusterLabel label, double weight = 1.0);

    // pseudocount(survivor) becomes the sum over `sources`; the other sources
    // are removed. Total mass is unchanged. Sources must all exist.
    void merge(std::span<const ClusterLabel> sources, ClusterLabel survivor);

    // Elementwise pseudocount addition; labels missing here are added.
    void absorb(const DirichletCategorical& other);

    double pseudocount(ClusterLabel label) const;
    double total() const;
    std::size_t size() const { return cells_.size(); }
    std::map<ClusterLabel, double> pseudocounts() const;

    // Normalized pseudocounts; uniform when the total is zero.
    Distribution probabilities() const;

    // Largest pseudocount among non-Outlier labels, ties to the smaller label.
    // Empty when no non-Outlier label exists or the total mass is zero.
    std::optional<ClusterLabel> argmax_cluster() const;

    void scale(double factor);

    bool operator==(const DirichletCategorical&) const = default;

private:
    struct Cell
    {
        double prior{ 0.0 };
        double count{ 0.0 };
        double mass() const { return prior + count; }
        bool operator==(const Cell&) const = default;
    };

    std::map<ClusterLabel, Cell> cells_;
};

} // namespace tripcast
