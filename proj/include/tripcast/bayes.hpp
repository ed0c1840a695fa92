#pragma once

#include "tripcast/dirichlet.hpp"
#include "tripcast/prediction.hpp"

#include <map>
#include <set>
#include <span>

#include <nlohmann/json_fwd.hpp>

namespace tripcast {

struct Priors
{
    double beta{ 1.0 };  // destination prior pseudocount
    double alpha{ 1.0 }; // per-source conditional prior pseudocount

    bool operator==(const Priors&) const = default;
};

// Dirichlet-categorical destination model: a global p(dest) and one
// p(dest | source) per source label, Outlier included on both sides.
class BayesianModel
{
public:
    // Starts with the label set {Outlier}.
    explicit BayesianModel(Priors priors = {});

    // Batch posterior: counts plus priors over `labels` ∪ {Outlier} ∪ every
    // label seen in `transitions`.
    static BayesianModel fit_offline(std::span<const Transition> transitions, const std::set<ClusterLabel>& labels,
                                     Priors priors = {});

    // Conditional on `source`; Outlier and unknown sources use the global
    // distribution. The choice excludes Outlier.
    Prediction predict(ClusterLabel source) const;
    Prediction predict_global() const;

    // Remaps the label space for the events, then counts the transition.
    // `transition.source` may be a pre-merge label. Invalid events or labels
    // throw std::invalid_argument before anything changes.
    void update(const Transition& transition, std::span<const ClusterEvent> events = {});

    // Label-space remap only.
    void apply_events(std::span<const ClusterEvent> events);

    std::set<ClusterLabel> labels() const;
    const Priors& priors() const { return priors_; }
    const DirichletCategorical& global() const { return global_; }
    const std::map<ClusterLabel, DirichletCategorical>& conditionals() const { return conditionals_; }

    nlohmann::json to_json() const;

    bool operator==(const BayesianModel&) const = default;

private:
    void add_label(ClusterLabel label);
    void validate(std::span<const ClusterEvent> events, const Transition* transition) const;

    Priors priors_;
    DirichletCategorical global_;
    std::map<ClusterLabel, DirichletCategorical> conditionals_;
};

Prediction prediction_from(const DirichletCategorical& dc);

nlohmann::json to_json(const DirichletCategorical& dc);

} // namespace tripcast
