#pragma once

#include "tripcast/clustering.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace tripcast {

// A destination not yet absorbed into any cluster.
struct PendingPoint
{
    GeoPoint pos;
    int neighbor_count{ 0 }; // epsilon-neighbors seen since arrival, plus centroid counts at arrival
    double t{ 0.0 };
    std::uint64_t seq{ 0 }; // arrival order
};

// V1 centroid: fixed radius radii_fraction * epsilon, several per cluster.
struct CentroidV1
{
    GeoPoint center;
    int count{ 1 };
    ClusterLabel label;
};

// V2 centroid: one per cluster, radius grows to cover upgraded points.
struct CentroidV2
{
    GeoPoint center;
    int count{ 1 };
    double radius_m{ 0.0 };
    ClusterLabel label;
};

struct Observation
{
    ClusterLabel label;               // label of the observed point right after the call
    std::vector<ClusterEvent> events; // structural changes, in order
};

enum class ClusterVariant
{
    Offline,
    V1,
    V2,
};

std::string to_string(ClusterVariant v);
ClusterVariant parse_cluster_variant(const std::string& name);

// Online density clustering with centroid compression. One instance per
// user stream; not safe for concurrent mutation.
class OnlineClusterer
{
public:
    explicit OnlineClusterer(const ClusterParams& params);
    virtual ~OnlineClusterer() = default;

    // Timestamps must be non-decreasing; a decreasing `t` or an invalid point
    // throws std::invalid_argument and leaves the state unchanged.
    Observation observe(const GeoPoint& point, double t);

    virtual ClusterDistances distances_to_clusters(const GeoPoint& source) const = 0;

    // Label the current state would give `p` without updating: the nearest
    // cluster whose epsilon-neighborhood contains it, else Outlier.
    virtual ClusterLabel classify(const GeoPoint& p) const = 0;

    virtual ClusterVariant variant() const = 0;
    virtual std::size_t centroid_count() const = 0;
    virtual nlohmann::json snapshot() const = 0;
    virtual std::unique_ptr<OnlineClusterer> clone() const = 0;

    const ClusterParams& params() const { return params_; }
    const std::set<ClusterLabel>& live_labels() const { return live_; }
    const std::vector<PendingPoint>& pending() const { return pending_; }
    std::optional<double> last_time() const { return last_t_; }

protected:
    // Counts centroid neighbors of a new pending point and tries to absorb it.
    virtual std::optional<ClusterLabel> try_absorb(const GeoPoint& point) = 0;
    virtual int centroid_neighbor_mass(const GeoPoint& point) const = 0;

    // Upgrades a qualifying pending point, returns the label it joins.
    virtual ClusterLabel upgrade(const PendingPoint& p, std::vector<ClusterEvent>& events) = 0;

    // Label of a centroid touched in the current call that strictly contains
    // `p`, incrementing its count.
    virtual std::optional<ClusterLabel> absorb_into_touched(const GeoPoint& p) = 0;
    virtual void clear_touched() = 0;

    ClusterLabel new_label(std::vector<ClusterEvent>& events);
    // Survivor is the smallest label; the others are retired.
    Merge retire_merged(std::set<ClusterLabel> labels, std::vector<ClusterEvent>& events);

    void base_to_json(nlohmann::json& j) const;
    void base_from_json(const nlohmann::json& j);

    ClusterParams params_;
    std::set<ClusterLabel> live_;
    std::vector<PendingPoint> pending_;
    int next_label_{ 0 };
    std::uint64_t next_seq_{ 0 };
    std::optional<double> last_t_;

private:
    void process_candidates(const std::vector<std::uint64_t>& batch, std::vector<ClusterEvent>& events,
                            std::optional<ClusterLabel>& own_label, std::uint64_t own_seq);
    void delete_old_points(double t);
};

class OnlineClusterV1 final : public OnlineClusterer
{
public:
    explicit OnlineClusterV1(const ClusterParams& params);

    ClusterDistances distances_to_clusters(const GeoPoint& source) const override;
    ClusterLabel classify(const GeoPoint& p) const override;
    ClusterVariant variant() const override { return ClusterVariant::V1; }
    std::size_t centroid_count() const override { return centroids_.size(); }
    nlohmann::json snapshot() const override;
    std::unique_ptr<OnlineClusterer> clone() const override;

    const std::vector<CentroidV1>& centroids() const { return centroids_; }

    static OnlineClusterV1 from_snapshot(const nlohmann::json& j);

private:
    std::optional<ClusterLabel> try_absorb(const GeoPoint& point) override;
    int centroid_neighbor_mass(const GeoPoint& point) const override;
    ClusterLabel upgrade(const PendingPoint& p, std::vector<ClusterEvent>& events) override;
    std::optional<ClusterLabel> absorb_into_touched(const GeoPoint& p) override;
    void clear_touched() override { touched_.clear(); }

    double centroid_radius() const { return params_.radii_fraction * params_.epsilon_m; }

    std::vector<CentroidV1> centroids_;
    std::vector<std::size_t> touched_;
};

class OnlineClusterV2 final : public OnlineClusterer
{
public:
    explicit OnlineClusterV2(const ClusterParams& params);

    ClusterDistances distances_to_clusters(const GeoPoint& source) const override;
    ClusterLabel classify(const GeoPoint& p) const override;
    ClusterVariant variant() const override { return ClusterVariant::V2; }
    std::size_t centroid_count() const override { return centroids_.size(); }
    nlohmann::json snapshot() const override;
    std::unique_ptr<OnlineClusterer> clone() const override;

    const std::vector<CentroidV2>& centroids() const { return centroids_; }

    static OnlineClusterV2 from_snapshot(const nlohmann::json& j);

private:
    std::optional<ClusterLabel> try_absorb(const GeoPoint& point) override;
    int centroid_neighbor_mass(const GeoPoint& point) const override;
    ClusterLabel upgrade(const PendingPoint& p, std::vector<ClusterEvent>& events) override;
    std::optional<ClusterLabel> absorb_into_touched(const GeoPoint& p) override;
    void clear_touched() override { touched_.clear(); }

    std::vector<CentroidV2> centroids_;
    std::set<ClusterLabel> touched_;
};

std::unique_ptr<OnlineClusterer> make_online_clusterer(ClusterVariant variant, const ClusterParams& params);
std::unique_ptr<OnlineClusterer> online_clusterer_from_snapshot(const nlohmann::json& j);

nlohmann::json params_to_json(const ClusterParams& params);
ClusterParams params_from_json(const nlohmann::json& j);

} // namespace tripcast
