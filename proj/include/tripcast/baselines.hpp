#pragma once

#include "tripcast/prediction.hpp"

#include <map>
#include <span>

#include <nlohmann/json_fwd.hpp>

namespace tripcast {

// Exponential weights over destination experts, stored as log-weights.
class ExpWeightsPool
{
public:
    // New experts enter with weight 1.
    void add_expert(ClusterLabel label);
    bool contains(ClusterLabel label) const { return log_weights_.contains(label); }

    // Merged experts pool their weights: w(survivor) = sum of w(sources).
    void merge(std::span<const ClusterLabel> sources, ClusterLabel survivor);
    void absorb(const ExpWeightsPool& other);

    // w_k *= exp(eta * reward_k) with reward 1 for `actual`, 0 otherwise.
    void reward(ClusterLabel actual, double eta);

    Distribution distribution() const;
    std::optional<ClusterLabel> leader() const;

    const std::map<ClusterLabel, double>& log_weights() const { return log_weights_; }

private:
    std::map<ClusterLabel, double> log_weights_;
};

// Exponential-weights baseline mirroring the Bayesian structure: a global
// pool plus one pool per source label.
class ExpWeightsModel
{
public:
    explicit ExpWeightsModel(double eta = 0.5);

    Prediction predict(ClusterLabel source) const;
    void update(ClusterLabel source, ClusterLabel actual, std::span<const ClusterEvent> events = {});
    void apply_events(std::span<const ClusterEvent> events);

    double eta() const { return eta_; }
    const ExpWeightsPool& global() const { return global_; }

    nlohmann::json to_json() const;

private:
    void add_label(ClusterLabel label);

    double eta_;
    ExpWeightsPool global_;
    std::map<ClusterLabel, ExpWeightsPool> conditionals_;
};

} // namespace tripcast
