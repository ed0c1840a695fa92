#pragma once

#include "tripcast/geo.hpp"
#include "tripcast/labels.hpp"

#include <map>
#include <set>
#include <span>
#include <vector>

namespace tripcast {

struct ClusterParams
{
    double epsilon_m{ 100.0 };
    int min_pts{ 2 };              // inclusive of the point itself
    double radii_fraction{ 0.5 };  // V1 centroid radius is radii_fraction * epsilon_m
    double delta{ 2.0 };           // source must be this many times closer to its nearest cluster
    double expire_s{ 28.0 * 86400.0 };
    double d_max_m{ 500.0 };       // sources farther than this from every cluster stay Outlier

    // Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

// Distance from a point to each live cluster, meters.
using ClusterDistances = std::map<ClusterLabel, double>;

// Source labeling rule: the nearest cluster wins when it is within d_max and,
// if another cluster exists, more than `delta` times closer than the runner-up.
ClusterLabel assign_source_label(const ClusterDistances& distances, const ClusterParams& params);

// DBSCAN with the haversine metric and strict `< epsilon` neighborhoods.
// Clusters are numbered in order of their first core point. A border point
// reachable from several clusters joins the cluster of its first core
// neighbor in input order.
std::vector<ClusterLabel> offline_dbscan(std::span<const GeoPoint> points, const ClusterParams& params);

// Offline clustering of a fixed point set, with lookups for new points.
class OfflineClustering
{
public:
    OfflineClustering() = default;
    OfflineClustering(std::vector<GeoPoint> points, const ClusterParams& params);

    const std::vector<ClusterLabel>& labels() const { return labels_; }
    const std::vector<GeoPoint>& points() const { return points_; }
    std::set<ClusterLabel> live_labels() const; // Outlier excluded

    // Label of the nearest core point within epsilon, else Outlier.
    ClusterLabel classify(const GeoPoint& p) const;

    // Minimum distance to any member of each cluster.
    ClusterDistances distances_to_clusters(const GeoPoint& source) const;

private:
    ClusterParams params_;
    std::vector<GeoPoint> points_;
    std::vector<ClusterLabel> labels_;
    std::vector<bool> core_;
};

} // namespace tripcast
