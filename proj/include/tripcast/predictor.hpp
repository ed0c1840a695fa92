#pragma once

#include "tripcast/baselines.hpp"
#include "tripcast/bayes.hpp"
#include "tripcast/experts.hpp"
#include "tripcast/prediction.hpp"

#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace tripcast {

enum class ModelKind
{
    Bayes,         // Dirichlet-categorical, conditioned on the source
    Expert,        // follow the awake leader
    Unconditioned, // Bayesian global distribution only
    ExpWeights,
    Greedy,        // Bayesian argmax with probability 1
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
std::vector<ModelKind> parse_model_list(const std::string& comma_separated);

struct PredictorOptions
{
    Priors priors;
    ExpertOptions expert;
    double eta{ 0.5 };
};

// Common surface of every destination model used by the pipeline.
class Predictor
{
public:
    virtual ~Predictor() = default;

    virtual ModelKind kind() const = 0;
    virtual Prediction predict(ClusterLabel source) const = 0;

    // `actual` is in the post-event label space; `source` may predate it.
    virtual void update(ClusterLabel source, ClusterLabel actual, std::span<const ClusterEvent> events) = 0;

    // Batch training on a fixed label space.
    virtual void fit(const std::set<ClusterLabel>& labels, std::span<const Transition> transitions);

    virtual nlohmann::json snapshot() const = 0;

protected:
    virtual void apply_events(std::span<const ClusterEvent> events) = 0;
};

std::unique_ptr<Predictor> make_predictor(ModelKind kind, const PredictorOptions& options);

// One-hot on the choice, or on Outlier when abstaining.
Distribution one_hot(const std::optional<ClusterLabel>& choice, const Distribution& support);

} // namespace tripcast
