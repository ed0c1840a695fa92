#pragma once

#include "tripcast/accuracy.hpp"
#include "tripcast/agreement.hpp"
#include "tripcast/clustering.hpp"
#include "tripcast/hellinger.hpp"
#include "tripcast/ingest.hpp"
#include "tripcast/keyvalue.hpp"
#include "tripcast/online_cluster.hpp"
#include "tripcast/predictor.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tripcast {

struct RunConfig
{
    ClusterParams cluster;
    PredictorOptions predictor;
    std::vector<ModelKind> models{ ModelKind::Bayes, ModelKind::Expert, ModelKind::Unconditioned,
                                   ModelKind::ExpWeights, ModelKind::Greedy };
    ClusterVariant variant{ ClusterVariant::V1 };
    double split{ 0.8 };
    std::uint64_t seed{ 1 };
    int threads{ 1 };

    // Keys: epsilon_m, min_pts, radii_fraction, delta, expire_days (inf
    // disables expiry), d_max_m, prior_beta, prior_alpha, models, variant,
    // split, seed, eta, expert_smoothing, expert_random_fallback, threads.
    // Unknown keys throw std::invalid_argument, as do out-of-range values.
    static RunConfig from_key_values(const KeyValues& kv);
    void validate() const;
    nlohmann::json to_json() const;
};

// Full-history offline clustering of one user's trips, evaluated on the same
// trips: destination labels, source labels and the empirical (MLE)
// destination distribution per source label.
struct OfflineOracle
{
    OfflineClustering clustering;
    std::vector<ClusterLabel> sources;
    std::vector<ClusterLabel> dests;
    std::map<ClusterLabel, Distribution> p_star;

    static OfflineOracle build(std::span<const Trip> trips, const ClusterParams& params);
};

// One user's online pipeline. Each trip is first predicted from the state
// built on earlier trips only, then observed.
class OnlineSession
{
public:
    OnlineSession(const RunConfig& config, std::uint64_t user_seed);

    struct Step
    {
        ClusterLabel source;
        std::vector<Prediction> predictions; // one per configured model
    };

    Step predict(const Trip& trip) const;
    // Clusters the destination, then updates every model with the source
    // label from the matching `predict` call.
    Observation observe(const Trip& trip, ClusterLabel source);

    const OnlineClusterer& clusterer() const { return *clusterer_; }
    const std::vector<std::unique_ptr<Predictor>>& models() const { return models_; }
    nlohmann::json snapshot() const;

private:
    std::unique_ptr<OnlineClusterer> clusterer_;
    std::vector<std::unique_ptr<Predictor>> models_;
};

struct SourceRegret
{
    ClusterLabel source; // offline oracle label
    std::vector<RegretRecord> records;
};

struct PredictionLogEntry
{
    std::size_t step{ 0 };
    bool test{ false };
    ClusterLabel source;
    ClusterLabel actual;
    ClusterLabel oracle_source;
    ClusterLabel oracle_dest;
    Prediction prediction;
    StateMap map;
};

struct ModelResult
{
    ModelKind kind;
    AccuracyScores accuracy;
    std::vector<SourceRegret> regret;
    std::vector<PredictionLogEntry> log;
};

struct AgreementRow
{
    std::size_t step{ 0 };
    AgreementScores scores;
};

struct UserResult
{
    std::string user_id;
    std::size_t trips{ 0 };
    std::size_t train{ 0 };
    std::vector<ModelResult> models;
    std::vector<AgreementRow> agreement; // evolution, online variants only
    AgreementScores final_agreement;
    std::size_t clusters{ 0 };
    nlohmann::json snapshot;
};

// Number of leading trips used for training.
std::size_t train_size(std::size_t trips, double split);

UserResult run_user(const std::string& user_id, std::span<const Trip> trips, const RunConfig& config);

// Users run independently, on up to `config.threads` workers; results come
// back in user-id order.
std::vector<UserResult> run_corpus(const Corpus& corpus, const RunConfig& config);

// Writes accuracy.csv, agreement.csv, agreement_final.csv, regret_<model>.csv,
// orphans_<model>.csv, predictions_<model>.jsonl, snapshots/<user>.json and
// summary.json into `out_dir`.
void write_reports(const std::filesystem::path& out_dir, const std::vector<UserResult>& results,
                   const RunConfig& config);

struct RunSummary
{
    std::map<ModelKind, double> mean_acc_all;
    std::map<ModelKind, double> mean_acc_clustered;
    AgreementScores mean_final_agreement;
    std::size_t users{ 0 };
};

RunSummary summarize(const std::vector<UserResult>& results);

} // namespace tripcast
