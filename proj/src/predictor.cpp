#include "tripcast/predictor.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tripcast {

std::string to_string(ModelKind kind)
{
    switch (kind) {
    case ModelKind::Bayes:
        return "bayes";
    case ModelKind::Expert:
        return "expert";
    case ModelKind::Unconditioned:
        return "unconditioned";
    case ModelKind::ExpWeights:
        return "exp_weights";
    case ModelKind::Greedy:
        return "greedy";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name)
{
    for (auto kind : { ModelKind::Bayes, ModelKind::Expert, ModelKind::Unconditioned, ModelKind::ExpWeights,
                       ModelKind::Greedy }) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown model '" + name +
                                "' (expected bayes, expert, unconditioned, exp_weights or greedy)");
}

std::vector<ModelKind> parse_model_list(const std::string& comma_separated)
{
    std::vector<ModelKind> out;
    std::stringstream ss(comma_separated);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(parse_model_kind(item));
        }
    }
    if (out.empty()) {
        throw std::invalid_argument("model list is empty");
    }
    return out;
}

Distribution one_hot(const std::optional<ClusterLabel>& choice, const Distribution& support)
{
    Distribution out;
    for (const auto& [label, p] : support) {
        out[label] = 0.0;
    }
    out[choice.value_or(ClusterLabel::outlier())] = 1.0;
    return out;
}

void Predictor::fit(const std::set<ClusterLabel>& labels, std::span<const Transition> transitions)
{
    std::vector<ClusterEvent> created;
    for (const auto& l : labels) {
        if (!l.is_outlier()) {
            created.emplace_back(NewCluster{ l });
        }
    }
    apply_events(created);
    for (const auto& t : transitions) {
        update(t.source, t.dest, {});
    }
}

namespace {

class BayesPredictor : public Predictor
{
public:
    enum class Output
    {
        Conditional,
        Global,
        Greedy,
    };

    BayesPredictor(Priors priors, Output output)
        : model_{ priors }
        , output_{ output }
    {}

    ModelKind kind() const override
    {
        switch (output_) {
        case Output::Global:
            return ModelKind::Unconditioned;
        case Output::Greedy:
            return ModelKind::Greedy;
        case Output::Conditional:
            break;
        }
        return ModelKind::Bayes;
    }

    Prediction predict(ClusterLabel source) const override
    {
        if (output_ == Output::Global) {
            return model_.predict_global();
        }
        auto p = model_.predict(source);
        if (output_ == Output::Greedy) {
            p.distribution = one_hot(p.choice, p.distribution);
        }
        return p;
    }

    void update(ClusterLabel source, ClusterLabel actual, std::span<const ClusterEvent> events) override
    {
        model_.update({ source, actual }, events);
    }

    void fit(const std::set<ClusterLabel>& labels, std::span<const Transition> transitions) override
    {
        model_ = BayesianModel::fit_offline(transitions, labels, model_.priors());
    }

    nlohmann::json snapshot() const override
    {
        auto j = model_.to_json();
        j["kind"] = to_string(kind());
        return j;
    }

protected:
    void apply_events(std::span<const ClusterEvent> events) override { model_.apply_events(events); }

private:
    BayesianModel model_;
    Output output_;
};

class ExpertPredictor : public Predictor
{
public:
    explicit ExpertPredictor(ExpertOptions options)
        : model_{ options }
    {}

    ModelKind kind() const override { return ModelKind::Expert; }
    Prediction predict(ClusterLabel source) const override { return model_.predict(source); }
    void update(ClusterLabel source, ClusterLabel actual, std::span<const ClusterEvent> events) override
    {
        model_.update(source, actual, events);
    }
    nlohmann::json snapshot() const override { return model_.to_json(); }

protected:
    void apply_events(std::span<const ClusterEvent> events) override { model_.apply_events(events); }

private:
    ExpertModel model_;
};

class ExpWeightsPredictor : public Predictor
{
public:
    explicit ExpWeightsPredictor(double eta)
        : model_{ eta }
    {}

    ModelKind kind() const override { return ModelKind::ExpWeights; }
    Prediction predict(ClusterLabel source) const override { return model_.predict(source); }
    void update(ClusterLabel source, ClusterLabel actual, std::span<const ClusterEvent> events) override
    {
        model_.update(source, actual, events);
    }
    nlohmann::json snapshot() const override { return model_.to_json(); }

protected:
    void apply_events(std::span<const ClusterEvent> events) override { model_.apply_events(events); }

private:
    ExpWeightsModel model_;
};

} // namespace

std::unique_ptr<Predictor> make_predictor(ModelKind kind, const PredictorOptions& options)
{
    switch (kind) {
    case ModelKind::Bayes:
        return std::make_unique<BayesPredictor>(options.priors, BayesPredictor::Output::Conditional);
    case ModelKind::Unconditioned:
        return std::make_unique<BayesPredictor>(options.priors, BayesPredictor::Output::Global);
    case ModelKind::Greedy:
        return std::make_unique<BayesPredictor>(options.priors, BayesPredictor::Output::Greedy);
    case ModelKind::Expert:
        return std::make_unique<ExpertPredictor>(options.expert);
    case ModelKind::ExpWeights:
        return std::make_unique<ExpWeightsPredictor>(options.eta);
    }
    throw std::invalid_argument("unknown model kind");
}

} // namespace tripcast
