#include "tripcast/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tripcast {

namespace {

double log_add(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

} // namespace

void ExpWeightsPool::add_expert(ClusterLabel label)
{
    log_weights_.emplace(label, 0.0);
}

void ExpWeightsPool::merge(std::span<const ClusterLabel> sources, ClusterLabel survivor)
{
    double combined = -std::numeric_limits<double>::infinity();
    for (const auto& s : sources) {
        auto it = log_weights_.find(s);
        if (it == log_weights_.end()) {
            throw std::out_of_range("merge of unknown expert " + s.to_string());
        }
        combined = log_add(combined, it->second);
    }
    for (const auto& s : sources) {
        log_weights_.erase(s);
    }
    log_weights_[survivor] = combined;
}

void ExpWeightsPool::absorb(const ExpWeightsPool& other)
{
    for (const auto& [label, lw] : other.log_weights_) {
        auto [it, inserted] = log_weights_.emplace(label, lw);
        if (!inserted) {
            it->second = log_add(it->second, lw);
        }
    }
}

void ExpWeightsPool::reward(ClusterLabel actual, double eta)
{
    if (auto it = log_weights_.find(actual); it != log_weights_.end()) {
        it->second += eta;
    }
}

Distribution ExpWeightsPool::distribution() const
{
    Distribution out;
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [label, lw] : log_weights_) {
        hi = std::max(hi, lw);
    }
    double total = 0.0;
    for (const auto& [label, lw] : log_weights_) {
        const double w = std::exp(lw - hi);
        out[label] = w;
        total += w;
    }
    for (auto& [label, w] : out) {
        w /= total;
    }
    return out;
}

std::optional<ClusterLabel> ExpWeightsPool::leader() const
{
    std::optional<ClusterLabel> best;
    double best_lw = -std::numeric_limits<double>::infinity();
    for (const auto& [label, lw] : log_weights_) {
        if (!label.is_outlier() && (!best || lw > best_lw)) {
            best = label;
            best_lw = lw;
        }
    }
    return best;
}

ExpWeightsModel::ExpWeightsModel(double eta)
    : eta_{ eta }
{
    if (!(eta > 0.0)) {
        throw std::invalid_argument("exp-weights learning rate must be positive");
    }
    add_label(ClusterLabel::outlier());
}

void ExpWeightsModel::add_label(ClusterLabel label)
{
    if (global_.contains(label)) {
        return;
    }
    global_.add_expert(label);
    for (auto& [source, pool] : conditionals_) {
        pool.add_expert(label);
    }
    ExpWeightsPool fresh;
    for (const auto& [existing, lw] : global_.log_weights()) {
        fresh.add_expert(existing);
    }
    conditionals_.emplace(label, std::move(fresh));
}

Prediction ExpWeightsModel::predict(ClusterLabel source) const
{
    const ExpWeightsPool* pool = &global_;
    if (!source.is_outlier()) {
        if (auto it = conditionals_.find(source); it != conditionals_.end()) {
            pool = &it->second;
        }
    }
    return { pool->distribution(), pool->leader() };
}

void ExpWeightsModel::apply_events(std::span<const ClusterEvent> events)
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
        ExpWeightsPool combined;
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

void ExpWeightsModel::update(ClusterLabel source, ClusterLabel actual, std::span<const ClusterEvent> events)
{
    apply_events(events);
    const auto resolved = resolve_label(source, events);
    if (!global_.contains(actual) || !conditionals_.contains(resolved)) {
        throw std::invalid_argument("exp-weights update references unknown label");
    }
    global_.reward(actual, eta_);
    conditionals_.at(resolved).reward(actual, eta_);
}

nlohmann::json ExpWeightsModel::to_json() const
{
    const auto pool_json = [](const ExpWeightsPool& pool) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [label, lw] : pool.log_weights()) {
            j[label.to_string()] = lw;
        }
        return j;
    };
    nlohmann::json conditionals = nlohmann::json::object();
    for (const auto& [source, pool] : conditionals_) {
        conditionals[source.to_string()] = pool_json(pool);
    }
    return { { "kind", "exp_weights" }, { "eta", eta_ }, { "global", pool_json(global_) }, { "conditionals", conditionals } };
}

} // namespace tripcast
