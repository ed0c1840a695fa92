#include "tripcast/clustering.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace tripcast {

namespace {

std::vector<std::vector<std::size_t>> neighborhoods(std::span<const GeoPoint> points, double epsilon_m)
{
    std::vector<std::vector<std::size_t>> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i].push_back(i);
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (haversine_distance(points[i], points[j]) < epsilon_m) {
                out[i].push_back(j);
                out[j].push_back(i);
            }
        }
    }
    for (auto& n : out) {
        std::ranges::sort(n);
    }
    return out;
}

struct DbscanResult
{
    std::vector<ClusterLabel> labels;
    std::vector<bool> core;
};

DbscanResult run_dbscan(std::span<const GeoPoint> points, const ClusterParams& params)
{
    const auto hood = neighborhoods(points, params.epsilon_m);
    DbscanResult r;
    r.labels.assign(points.size(), ClusterLabel::outlier());
    r.core.assign(points.size(), false);
    for (std::size_t i = 0; i < points.size(); ++i) {
        r.core[i] = static_cast<int>(hood[i].size()) >= params.min_pts;
    }

    // Core points: connected components of the core-core epsilon graph.
    int next = 0;
    for (std::size_t seed = 0; seed < points.size(); ++seed) {
        if (!r.core[seed] || !r.labels[seed].is_outlier()) {
            continue;
        }
        const ClusterLabel label{ next++ };
        std::deque<std::size_t> frontier{ seed };
        r.labels[seed] = label;
        while (!frontier.empty()) {
            const auto p = frontier.front();
            frontier.pop_front();
            for (auto q : hood[p]) {
                if (r.core[q] && r.labels[q].is_outlier()) {
                    r.labels[q] = label;
                    frontier.push_back(q);
                }
            }
        }
    }

    // Border points take the cluster of their first core neighbor.
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (r.core[i]) {
            continue;
        }
        for (auto q : hood[i]) {
            if (r.core[q]) {
                r.labels[i] = r.labels[q];
                break;
            }
        }
    }
    return r;
}

} // namespace

std::vector<ClusterLabel> offline_dbscan(std::span<const GeoPoint> points, const ClusterParams& params)
{
    return run_dbscan(points, params).labels;
}

OfflineClustering::OfflineClustering(std::vector<GeoPoint> points, const ClusterParams& params)
    : params_{ params }
    , points_{ std::move(points) }
{
    auto result = run_dbscan(points_, params_);
    labels_ = std::move(result.labels);
    core_ = std::move(result.core);
}

std::set<ClusterLabel> OfflineClustering::live_labels() const
{
    std::set<ClusterLabel> out;
    for (const auto& l : labels_) {
        if (!l.is_outlier()) {
            out.insert(l);
        }
    }
    return out;
}

ClusterLabel OfflineClustering::classify(const GeoPoint& p) const
{
    double best = std::numeric_limits<double>::infinity();
    ClusterLabel label = ClusterLabel::outlier();
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!core_[i]) {
            continue;
        }
        const double d = haversine_distance(p, points_[i]);
        if (d < params_.epsilon_m && d < best) {
            best = d;
            label = labels_[i];
        }
    }
    return label;
}

ClusterDistances OfflineClustering::distances_to_clusters(const GeoPoint& source) const
{
    ClusterDistances out;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (labels_[i].is_outlier()) {
            continue;
        }
        const double d = haversine_distance(source, points_[i]);
        auto [it, inserted] = out.emplace(labels_[i], d);
        if (!inserted && d < it->second) {
            it->second = d;
        }
    }
    return out;
}

} // namespace tripcast
