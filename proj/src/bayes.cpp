#include "tripcast/bayes.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tripcast {

Prediction prediction_from(const DirichletCategorical& dc)
{
    return { dc.probabilities(), dc.argmax_cluster() };
}

nlohmann::json to_json(const DirichletCategorical& dc)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [label, mass] : dc.pseudocounts()) {
        j[label.to_string()] = mass;
    }
    return j;
}

BayesianModel::BayesianModel(Priors priors)
    : priors_{ priors }
{
    if (priors.alpha < 0.0 || priors.beta < 0.0) {
        throw std::invalid_argument("priors must be non-negative");
    }
    add_label(ClusterLabel::outlier());
}

void BayesianModel::add_label(ClusterLabel label)
{
    if (global_.contains(label)) {
        return;
    }
    global_.add_label(label, priors_.beta);
    for (auto& [source, dc] : conditionals_) {
        dc.add_label(label, priors_.alpha);
    }
    DirichletCategorical fresh;
    for (const auto& [existing, mass] : global_.pseudocounts()) {
        fresh.add_label(existing, priors_.alpha);
    }
    conditionals_.emplace(label, std::move(fresh));
}

BayesianModel BayesianModel::fit_offline(std::span<const Transition> transitions, const std::set<ClusterLabel>& labels,
                                         Priors priors)
{
    std::set<ClusterLabel> all = labels;
    all.insert(ClusterLabel::outlier());
    std::map<ClusterLabel, double> dest_counts;
    std::map<std::pair<ClusterLabel, ClusterLabel>, double> pair_counts;
    for (const auto& t : transitions) {
        all.insert(t.source);
        all.insert(t.dest);
        dest_counts[t.dest] += 1.0;
        pair_counts[{ t.source, t.dest }] += 1.0;
    }

    BayesianModel model(priors);
    model.global_ = {};
    model.conditionals_.clear();
    for (const auto& k : all) {
        model.global_.add_label(k, priors.beta, dest_counts[k]);
    }
    for (const auto& j : all) {
        DirichletCategorical dc;
        for (const auto& k : all) {
            dc.add_label(k, priors.alpha, pair_counts[{ j, k }]);
        }
        model.conditionals_.emplace(j, std::move(dc));
    }
    return model;
}

Prediction BayesianModel::predict(ClusterLabel source) const
{
    if (source.is_outlier()) {
        return predict_global();
    }
    auto it = conditionals_.find(source);
    if (it == conditionals_.end()) {
        return predict_global();
    }
    return prediction_from(it->second);
}

Prediction BayesianModel::predict_global() const
{
    return prediction_from(global_);
}

void BayesianModel::validate(std::span<const ClusterEvent> events, const Transition* transition) const
{
    std::set<ClusterLabel> live = labels();
    for (const auto& event : events) {
        if (const auto* created = std::get_if<NewCluster>(&event)) {
            if (created->label.is_outlier() || live.contains(created->label)) {
                throw std::invalid_argument("new cluster event for existing label " + created->label.to_string());
            }
            live.insert(created->label);
            continue;
        }
        const auto& merge = std::get<Merge>(event);
        if (merge.sources.size() < 2 ||
            std::ranges::find(merge.sources, merge.survivor) == merge.sources.end()) {
            throw std::invalid_argument("malformed merge event");
        }
        for (const auto& s : merge.sources) {
            if (s.is_outlier() || !live.contains(s)) {
                throw std::invalid_argument("merge event references unknown label " + s.to_string());
            }
        }
        for (const auto& s : merge.sources) {
            if (s != merge.survivor) {
                live.erase(s);
            }
        }
    }
    if (transition) {
        const auto source = resolve_label(transition->source, events);
        if (!live.contains(source) || !live.contains(transition->dest)) {
            throw std::invalid_argument("transition references unknown label");
        }
    }
}

void BayesianModel::apply_events(std::span<const ClusterEvent> events)
{
    validate(events, nullptr);
    for (const auto& event : events) {
        if (const auto* created = std::get_if<NewCluster>(&event)) {
            add_label(created->label);
            continue;
        }
        const auto& merge = std::get<Merge>(event);
        global_.merge(merge.sources, merge.survivor);
        for (auto& [source, dc] : conditionals_) {
            dc.merge(merge.sources, merge.survivor);
        }
        DirichletCategorical combined;
        for (const auto& s : merge.sources) {
            auto node = conditionals_.extract(s);
            combined.absorb(node.mapped());
        }
        conditionals_.emplace(merge.survivor, std::move(combined));
    }
}

void BayesianModel::update(const Transition& transition, std::span<const ClusterEvent> events)
{
    validate(events, &transition);
    apply_events(events);
    const auto source = resolve_label(transition.source, events);
    global_.observe(transition.dest);
    conditionals_.at(source).observe(transition.dest);
}

std::set<ClusterLabel> BayesianModel::labels() const
{
    std::set<ClusterLabel> out;
    for (const auto& [label, mass] : global_.pseudocounts()) {
        out.insert(label);
    }
    return out;
}

nlohmann::json BayesianModel::to_json() const
{
    nlohmann::json conditionals = nlohmann::json::object();
    for (const auto& [source, dc] : conditionals_) {
        conditionals[source.to_string()] = tripcast::to_json(dc);
    }
    return { { "kind", "bayes" },
             { "beta", priors_.beta },
             { "alpha", priors_.alpha },
             { "global", tripcast::to_json(global_) },
             { "conditionals", conditionals } };
}

} // namespace tripcast
