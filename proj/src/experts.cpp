#include "tripcast/experts.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace tripcast {

void ExpertPool::add_expert(ClusterLabel label)
{
    tallies_.emplace(label, ExpertTally{});
}

void ExpertPool::merge(std::span<const ClusterLabel> sources, ClusterLabel survivor)
{
    ExpertTally combined;
    for (const auto& s : sources) {
        auto it = tallies_.find(s);
        if (it == tallies_.end()) {
            throw std::out_of_range("merge of unknown expert " + s.to_string());
        }
        combined.z += it->second.z;
        combined.n = std::max(combined.n, it->second.n);
    }
    for (const auto& s : sources) {
        tallies_.erase(s);
    }
    tallies_[survivor] = combined;
}

void ExpertPool::absorb(const ExpertPool& other)
{
    for (const auto& [label, tally] : other.tallies_) {
        auto& mine = tallies_[label];
        mine.z += tally.z;
        mine.n += tally.n;
    }
}

void ExpertPool::reward(ClusterLabel actual)
{
    for (auto& [label, tally] : tallies_) {
        ++tally.n;
        if (label == actual) {
            ++tally.z;
        }
    }
}

std::optional<ClusterLabel> ExpertPool::leader() const
{
    std::optional<ClusterLabel> best;
    ExpertTally best_tally;
    for (const auto& [label, tally] : tallies_) {
        if (label.is_outlier() || tally.n == 0) {
            continue;
        }
        if (!best) {
            best = label;
            best_tally = tally;
            continue;
        }
        // Exact comparison of z/n via cross-multiplication.
        const auto lhs = tally.z * best_tally.n;
        const auto rhs = best_tally.z * tally.n;
        if (lhs > rhs || (lhs == rhs && tally.z > best_tally.z)) {
            best = label;
            best_tally = tally;
        }
    }
    return best;
}

Distribution ExpertPool::smoothed_distribution(double kappa) const
{
    Distribution out;
    const double size = static_cast<double>(tallies_.size());
    double total = 0.0;
    for (const auto& [label, tally] : tallies_) {
        const double denom = static_cast<double>(tally.n) + kappa * size;
        const double v = denom > 0.0 ? (static_cast<double>(tally.z) + kappa) / denom : 1.0;
        out[label] = v;
        total += v;
    }
    for (auto& [label, v] : out) {
        v = total > 0.0 ? v / total : 1.0 / size;
    }
    return out;
}

nlohmann::json to_json(const ExpertPool& pool)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [label, tally] : pool.tallies()) {
        j[label.to_string()] = { { "z", tally.z }, { "n", tally.n } };
    }
    return j;
}

ExpertModel::ExpertModel(ExpertOptions options)
    : options_{ options }
    , rng_{ options.seed }
{
    if (options.smoothing < 0.0) {
        throw std::invalid_argument("expert smoothing must be non-negative");
    }
    add_label(ClusterLabel::outlier());
}

void ExpertModel::add_label(ClusterLabel label)
{
    if (global_.contains(label)) {
        return;
    }
    global_.add_expert(label);
    for (auto& [source, pool] : conditionals_) {
        pool.add_expert(label);
    }
    ExpertPool fresh;
    for (const auto& [existing, tally] : global_.tallies()) {
        fresh.add_expert(existing);
    }
    conditionals_.emplace(label, std::move(fresh));
}

const ExpertPool& ExpertModel::pool_for(ClusterLabel source) const
{
    if (!source.is_outlier()) {
        if (auto it = conditionals_.find(source); it != conditionals_.end()) {
            return it->second;
        }
    }
    return global_;
}

Prediction ExpertModel::predict(ClusterLabel source) const
{
    const auto& pool = pool_for(source);
    Prediction p{ pool.smoothed_distribution(options_.smoothing), pool.leader() };
    if (!p.choice && options_.random_fallback) {
        std::vector<ClusterLabel> awake;
        for (const auto& [label, tally] : pool.tallies()) {
            if (!label.is_outlier()) {
                awake.push_back(label);
            }
        }
        if (!awake.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, awake.size() - 1);
            p.choice = awake[pick(rng_)];
        }
    }
    return p;
}

void ExpertModel::apply_events(std::span<const ClusterEvent> events)
{
    for (const auto& event : events) {
        if (const auto* created = std::get_if<NewCluster>(&event)) {
            add_label(created->label);
            continue;
        }
        const auto& merge = std::get<Merge>(event);
        global_.merge(merge.sources, merge.survivor);
        for (auto& [source, pool] : conditionals_) {
            pool.merge(merge.sources, merge.survivor);
        }
        ExpertPool combined;
        for (const auto& s : merge.sources) {
            auto node = conditionals_.extract(s);
            if (node.empty()) {
                throw std::out_of_range("merge of unknown source pool " + s.to_string());
            }
            combined.absorb(node.mapped());
        }
        conditionals_.emplace(merge.survivor, std::move(combined));
    }
}

void ExpertModel::update(ClusterLabel source, ClusterLabel actual, std::span<const ClusterEvent> events)
{
    apply_events(events);
    const auto resolved = resolve_label(source, events);
    if (!global_.contains(actual) || !conditionals_.contains(resolved)) {
        throw std::invalid_argument("expert update references unknown label");
    }
    global_.reward(actual);
    conditionals_.at(resolved).reward(actual);
}

nlohmann::json ExpertModel::to_json() const
{
    nlohmann::json conditionals = nlohmann::json::object();
    for (const auto& [source, pool] : conditionals_) {
        conditionals[source.to_string()] = tripcast::to_json(pool);
    }
    return { { "kind", "expert" }, { "global", tripcast::to_json(global_) }, { "conditionals", conditionals } };
}

} // namespace tripcast
