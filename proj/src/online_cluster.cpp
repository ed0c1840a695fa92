#include "tripcast/online_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tripcast {

using nlohmann::json;

std::string to_string(ClusterVariant v)
{
    switch (v) {
    case ClusterVariant::Offline:
        return "offline";
    case ClusterVariant::V1:
        return "v1";
    case ClusterVariant::V2:
        return "v2";
    }
    return "unknown";
}

ClusterVariant parse_cluster_variant(const std::string& name)
{
    if (name == "offline") {
        return ClusterVariant::Offline;
    }
    if (name == "v1") {
        return ClusterVariant::V1;
    }
    if (name == "v2") {
        return ClusterVariant::V2;
    }
    throw std::invalid_argument("unknown clustering variant '" + name + "' (expected offline, v1 or v2)");
}

// ---------------------------------------------------------------------------
// Shared streaming logic

OnlineClusterer::OnlineClusterer(const ClusterParams& params)
    : params_{ params }
{
    params_.validate();
}

Observation OnlineClusterer::observe(const GeoPoint& point, double t)
{
    if (!point.is_valid()) {
        throw std::invalid_argument("observe: invalid coordinate");
    }
    if (!std::isfinite(t)) {
        throw std::invalid_argument("observe: timestamp must be finite");
    }
    if (last_t_ && t < *last_t_) {
        throw std::invalid_argument("observe: timestamps must be non-decreasing");
    }
    last_t_ = t;
    clear_touched();

    std::vector<std::uint64_t> batch;
    for (auto& p : pending_) {
        if (haversine_distance(point, p.pos) < params_.epsilon_m) {
            ++p.neighbor_count;
            batch.push_back(p.seq);
        }
    }

    std::optional<ClusterLabel> own = try_absorb(point);
    const std::uint64_t own_seq = next_seq_++;
    if (!own) {
        const int n = static_cast<int>(batch.size()) + centroid_neighbor_mass(point);
        pending_.push_back({ point, n, t, own_seq });
        batch.push_back(own_seq);
    }

    std::vector<ClusterEvent> events;
    process_candidates(batch, events, own, own_seq);
    delete_old_points(t);

    Observation obs;
    obs.label = own ? resolve_label(*own, events) : ClusterLabel::outlier();
    obs.events = std::move(events);
    return obs;
}

void OnlineClusterer::process_candidates(const std::vector<std::uint64_t>& batch, std::vector<ClusterEvent>& events,
                                         std::optional<ClusterLabel>& own_label, std::uint64_t own_seq)
{
    const auto find_seq = [this](std::uint64_t seq) {
        return std::ranges::find(pending_, seq, &PendingPoint::seq);
    };

    // Candidates in arrival order. A candidate inside a centroid created or
    // grown earlier in this call is absorbed instead of upgraded.
    for (const auto seq : batch) {
        auto it = find_seq(seq);
        if (it == pending_.end()) {
            continue;
        }
        const PendingPoint p = *it;
        std::optional<ClusterLabel> joined = absorb_into_touched(p.pos);
        if (!joined && p.neighbor_count >= params_.min_pts - 1) {
            joined = upgrade(p, events);
        }
        if (joined) {
            pending_.erase(find_seq(seq));
            if (seq == own_seq) {
                own_label = joined;
            }
        }
    }

    // No pending point may remain inside a centroid touched by this call.
    for (auto it = pending_.begin(); it != pending_.end();) {
        if (auto joined = absorb_into_touched(it->pos)) {
            if (it->seq == own_seq) {
                own_label = joined;
            }
            it = pending_.erase(it);
        } else {
            ++it;
        }
    }
}

void OnlineClusterer::delete_old_points(double t)
{
    std::erase_if(pending_, [&](const PendingPoint& p) { return t - p.t > params_.expire_s; });
}

ClusterLabel OnlineClusterer::new_label(std::vector<ClusterEvent>& events)
{
    const ClusterLabel label{ next_label_++ };
    live_.insert(label);
    events.emplace_back(NewCluster{ label });
    return label;
}

Merge OnlineClusterer::retire_merged(std::set<ClusterLabel> labels, std::vector<ClusterEvent>& events)
{
    Merge merge;
    merge.sources.assign(labels.begin(), labels.end());
    merge.survivor = merge.sources.front();
    for (std::size_t i = 1; i < merge.sources.size(); ++i) {
        live_.erase(merge.sources[i]);
    }
    events.emplace_back(merge);
    return merge;
}

json params_to_json(const ClusterParams& p)
{
    return { { "epsilon_m", p.epsilon_m },
             { "min_pts", p.min_pts },
             { "radii_fraction", p.radii_fraction },
             { "delta", p.delta },
             { "expire_s", std::isinf(p.expire_s) ? json(nullptr) : json(p.expire_s) },
             { "d_max_m", p.d_max_m } };
}

ClusterParams params_from_json(const json& j)
{
    ClusterParams p;
    p.epsilon_m = j.at("epsilon_m").get<double>();
    p.min_pts = j.at("min_pts").get<int>();
    p.radii_fraction = j.at("radii_fraction").get<double>();
    p.delta = j.at("delta").get<double>();
    p.expire_s = j.at("expire_s").is_null() ? std::numeric_limits<double>::infinity() : j.at("expire_s").get<double>();
    p.d_max_m = j.at("d_max_m").get<double>();
    p.validate();
    return p;
}

void OnlineClusterer::base_to_json(json& j) const
{
    j["variant"] = to_string(variant());
    j["params"] = params_to_json(params_);
    j["next_label"] = next_label_;
    j["next_seq"] = next_seq_;
    j["last_t"] = last_t_ ? json(*last_t_) : json(nullptr);
    json live = json::array();
    for (const auto& l : live_) {
        live.push_back(l.value());
    }
    j["live_labels"] = live;
    json pending = json::array();
    for (const auto& p : pending_) {
        pending.push_back(
            { { "lat", p.pos.lat }, { "lon", p.pos.lon }, { "neighbors", p.neighbor_count }, { "t", p.t }, { "seq", p.seq } });
    }
    j["pending"] = pending;
}

void OnlineClusterer::base_from_json(const json& j)
{
    next_label_ = j.value("next_label", 0);
    next_seq_ = j.value("next_seq", std::uint64_t{ 0 });
    if (j.contains("last_t") && !j.at("last_t").is_null()) {
        last_t_ = j.at("last_t").get<double>();
    }
    live_.clear();
    for (const auto& l : j.value("live_labels", json::array())) {
        live_.insert(ClusterLabel{ l.get<int>() });
    }
    pending_.clear();
    for (const auto& p : j.value("pending", json::array())) {
        PendingPoint pp;
        pp.pos = GeoPoint::checked(p.at("lat").get<double>(), p.at("lon").get<double>());
        pp.neighbor_count = p.at("neighbors").get<int>();
        pp.t = p.at("t").get<double>();
        pp.seq = p.contains("seq") ? p.at("seq").get<std::uint64_t>() : next_seq_++;
        pending_.push_back(pp);
    }
    std::ranges::sort(pending_, {}, &PendingPoint::seq);
    if (!pending_.empty()) {
        next_seq_ = std::max(next_seq_, pending_.back().seq + 1);
    }
}

// ---------------------------------------------------------------------------
// V1: fixed-radius centroids, several per cluster

OnlineClusterV1::OnlineClusterV1(const ClusterParams& params)
    : OnlineClusterer(params)
{}

std::optional<ClusterLabel> OnlineClusterV1::try_absorb(const GeoPoint& point)
{
    double best = std::numeric_limits<double>::infinity();
    CentroidV1* nearest = nullptr;
    for (auto& c : centroids_) {
        const double d = haversine_distance(point, c.center);
        if (d < best) {
            best = d;
            nearest = &c;
        }
    }
    if (nearest && best < centroid_radius()) {
        ++nearest->count;
        return nearest->label;
    }
    return std::nullopt;
}

int OnlineClusterV1::centroid_neighbor_mass(const GeoPoint& point) const
{
    const double reach = centroid_radius() + params_.epsilon_m;
    int mass = 0;
    for (const auto& c : centroids_) {
        if (haversine_distance(point, c.center) < reach) {
            mass += c.count;
        }
    }
    return mass;
}

ClusterLabel OnlineClusterV1::upgrade(const PendingPoint& p, std::vector<ClusterEvent>& events)
{
    const double reach = centroid_radius() + params_.epsilon_m;
    std::set<ClusterLabel> neighbors;
    for (const auto& c : centroids_) {
        if (haversine_distance(p.pos, c.center) < reach) {
            neighbors.insert(c.label);
        }
    }

    ClusterLabel label;
    if (neighbors.empty()) {
        label = new_label(events);
    } else if (neighbors.size() == 1) {
        label = *neighbors.begin();
    } else {
        const auto merge = retire_merged(neighbors, events);
        for (auto& c : centroids_) {
            if (neighbors.contains(c.label)) {
                c.label = merge.survivor;
            }
        }
        label = merge.survivor;
    }
    centroids_.push_back({ p.pos, 1, label });
    touched_.push_back(centroids_.size() - 1);
    return label;
}

std::optional<ClusterLabel> OnlineClusterV1::absorb_into_touched(const GeoPoint& p)
{
    double best = std::numeric_limits<double>::infinity();
    CentroidV1* nearest = nullptr;
    for (const auto idx : touched_) {
        auto& c = centroids_[idx];
        const double d = haversine_distance(p, c.center);
        if (d < best) {
            best = d;
            nearest = &c;
        }
    }
    if (nearest && best < centroid_radius()) {
        ++nearest->count;
        return nearest->label;
    }
    return std::nullopt;
}

ClusterDistances OnlineClusterV1::distances_to_clusters(const GeoPoint& source) const
{
    ClusterDistances out;
    for (const auto& c : centroids_) {
        const double d = std::max(0.0, haversine_distance(source, c.center) - centroid_radius());
        auto [it, inserted] = out.emplace(c.label, d);
        if (!inserted && d < it->second) {
            it->second = d;
        }
    }
    return out;
}

ClusterLabel OnlineClusterV1::classify(const GeoPoint& p) const
{
    const double reach = centroid_radius() + params_.epsilon_m;
    double best = std::numeric_limits<double>::infinity();
    ClusterLabel label = ClusterLabel::outlier();
    for (const auto& c : centroids_) {
        const double d = haversine_distance(p, c.center);
        if (d < reach && d < best) {
            best = d;
            label = c.label;
        }
    }
    return label;
}

json OnlineClusterV1::snapshot() const
{
    json j;
    base_to_json(j);
    json centroids = json::array();
    for (const auto& c : centroids_) {
        centroids.push_back({ { "lat", c.center.lat },
                              { "lon", c.center.lon },
                              { "count", c.count },
                              { "radius_m", centroid_radius() },
                              { "label", c.label.value() } });
    }
    j["centroids"] = centroids;
    return j;
}

OnlineClusterV1 OnlineClusterV1::from_snapshot(const json& j)
{
    OnlineClusterV1 out(params_from_json(j.at("params")));
    out.base_from_json(j);
    for (const auto& c : j.value("centroids", json::array())) {
        CentroidV1 cv;
        cv.center = GeoPoint::checked(c.at("lat").get<double>(), c.at("lon").get<double>());
        cv.count = c.at("count").get<int>();
        cv.label = ClusterLabel{ c.at("label").get<int>() };
        out.centroids_.push_back(cv);
        out.live_.insert(cv.label);
        out.next_label_ = std::max(out.next_label_, cv.label.value() + 1);
    }
    return out;
}

std::unique_ptr<OnlineClusterer> OnlineClusterV1::clone() const
{
    return std::make_unique<OnlineClusterV1>(*this);
}

// ---------------------------------------------------------------------------
// V2: one growing disc per cluster

OnlineClusterV2::OnlineClusterV2(const ClusterParams& params)
    : OnlineClusterer(params)
{}

std::optional<ClusterLabel> OnlineClusterV2::try_absorb(const GeoPoint& point)
{
    double best = std::numeric_limits<double>::infinity();
    CentroidV2* nearest = nullptr;
    for (auto& c : centroids_) {
        const double gap = haversine_distance(point, c.center) - c.radius_m;
        if (gap < best) {
            best = gap;
            nearest = &c;
        }
    }
    if (nearest && best < 0.0) {
        ++nearest->count;
        return nearest->label;
    }
    return std::nullopt;
}

int OnlineClusterV2::centroid_neighbor_mass(const GeoPoint& point) const
{
    int mass = 0;
    for (const auto& c : centroids_) {
        if (haversine_distance(point, c.center) - c.radius_m < params_.epsilon_m) {
            mass += c.count;
        }
    }
    return mass;
}

ClusterLabel OnlineClusterV2::upgrade(const PendingPoint& p, std::vector<ClusterEvent>& events)
{
    std::vector<std::size_t> neighbors;
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
        if (haversine_distance(p.pos, centroids_[i].center) - centroids_[i].radius_m < params_.epsilon_m) {
            neighbors.push_back(i);
        }
    }

    if (neighbors.empty()) {
        const auto label = new_label(events);
        centroids_.push_back({ p.pos, 1, 0.0, label });
        touched_.insert(label);
        return label;
    }

    if (neighbors.size() == 1) {
        auto& c = centroids_[neighbors.front()];
        c.radius_m = std::max(c.radius_m, haversine_distance(p.pos, c.center));
        ++c.count;
        touched_.insert(c.label);
        return c.label;
    }

    // Count-weighted center of the merging discs plus the point; the new
    // radius covers every merged disc and the point.
    std::vector<GeoPoint> centers;
    std::vector<double> weights;
    std::set<ClusterLabel> labels;
    int count = 1;
    for (const auto i : neighbors) {
        centers.push_back(centroids_[i].center);
        weights.push_back(static_cast<double>(centroids_[i].count));
        labels.insert(centroids_[i].label);
        count += centroids_[i].count;
    }
    centers.push_back(p.pos);
    weights.push_back(1.0);
    const GeoPoint center = weighted_center(centers, weights);

    double radius = haversine_distance(center, p.pos);
    for (const auto i : neighbors) {
        radius = std::max(radius, haversine_distance(center, centroids_[i].center) + centroids_[i].radius_m);
    }

    const auto merge = retire_merged(labels, events);
    for (std::size_t k = 1; k < merge.sources.size(); ++k) {
        touched_.erase(merge.sources[k]);
    }
    std::erase_if(centroids_, [&](const CentroidV2& c) { return labels.contains(c.label) && c.label != merge.survivor; });
    auto survivor = std::ranges::find(centroids_, merge.survivor, &CentroidV2::label);
    *survivor = { center, count, radius, merge.survivor };
    touched_.insert(merge.survivor);
    return merge.survivor;
}

std::optional<ClusterLabel> OnlineClusterV2::absorb_into_touched(const GeoPoint& p)
{
    double best = std::numeric_limits<double>::infinity();
    CentroidV2* nearest = nullptr;
    for (auto& c : centroids_) {
        if (!touched_.contains(c.label)) {
            continue;
        }
        const double gap = haversine_distance(p, c.center) - c.radius_m;
        if (gap < best) {
            best = gap;
            nearest = &c;
        }
    }
    if (nearest && best < 0.0) {
        ++nearest->count;
        return nearest->label;
    }
    return std::nullopt;
}

ClusterDistances OnlineClusterV2::distances_to_clusters(const GeoPoint& source) const
{
    ClusterDistances out;
    for (const auto& c : centroids_) {
        out[c.label] = std::max(0.0, haversine_distance(source, c.center) - c.radius_m);
    }
    return out;
}

ClusterLabel OnlineClusterV2::classify(const GeoPoint& p) const
{
    double best = std::numeric_limits<double>::infinity();
    ClusterLabel label = ClusterLabel::outlier();
    for (const auto& c : centroids_) {
        const double gap = haversine_distance(p, c.center) - c.radius_m;
        if (gap < params_.epsilon_m && gap < best) {
            best = gap;
            label = c.label;
        }
    }
    return label;
}

json OnlineClusterV2::snapshot() const
{
    json j;
    base_to_json(j);
    json centroids = json::array();
    for (const auto& c : centroids_) {
        centroids.push_back({ { "lat", c.center.lat },
                              { "lon", c.center.lon },
                              { "count", c.count },
                              { "radius_m", c.radius_m },
                              { "label", c.label.value() } });
    }
    j["centroids"] = centroids;
    return j;
}

OnlineClusterV2 OnlineClusterV2::from_snapshot(const json& j)
{
    OnlineClusterV2 out(params_from_json(j.at("params")));
    out.base_from_json(j);
    for (const auto& c : j.value("centroids", json::array())) {
        CentroidV2 cv;
        cv.center = GeoPoint::checked(c.at("lat").get<double>(), c.at("lon").get<double>());
        cv.count = c.at("count").get<int>();
        cv.radius_m = c.value("radius_m", 0.0);
        cv.label = ClusterLabel{ c.at("label").get<int>() };
        if (std::ranges::find(out.centroids_, cv.label, &CentroidV2::label) != out.centroids_.end()) {
            throw std::invalid_argument("v2 snapshot has two centroids with label " + cv.label.to_string());
        }
        out.centroids_.push_back(cv);
        out.live_.insert(cv.label);
        out.next_label_ = std::max(out.next_label_, cv.label.value() + 1);
    }
    return out;
}

std::unique_ptr<OnlineClusterer> OnlineClusterV2::clone() const
{
    return std::make_unique<OnlineClusterV2>(*this);
}

// ---------------------------------------------------------------------------

std::unique_ptr<OnlineClusterer> make_online_clusterer(ClusterVariant variant, const ClusterParams& params)
{
    switch (variant) {
    case ClusterVariant::V1:
        return std::make_unique<OnlineClusterV1>(params);
    case ClusterVariant::V2:
        return std::make_unique<OnlineClusterV2>(params);
    case ClusterVariant::Offline:
        break;
    }
    throw std::invalid_argument("make_online_clusterer: offline is not a streaming variant");
}

std::unique_ptr<OnlineClusterer> online_clusterer_from_snapshot(const json& j)
{
    const auto variant = parse_cluster_variant(j.at("variant").get<std::string>());
    if (variant == ClusterVariant::V1) {
        return std::make_unique<OnlineClusterV1>(OnlineClusterV1::from_snapshot(j));
    }
    if (variant == ClusterVariant::V2) {
        return std::make_unique<OnlineClusterV2>(OnlineClusterV2::from_snapshot(j));
    }
    throw std::invalid_argument("snapshot variant must be v1 or v2");
}

} // namespace tripcast
