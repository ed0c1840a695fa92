#include "tripcast/pipeline.hpp"

#include "tripcast/csv_io.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace tripcast {

using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys = {
    "epsilon_m", "min_pts", "radii_fraction", "delta",     "expire_days",      "d_max_m",
    "prior_beta", "prior_alpha", "models", "variant", "split", "seed", "eta", "expert_smoothing",
    "expert_random_fallback", "threads",
};

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t user_seed(const std::string& user_id, std::uint64_t seed)
{
    std::seed_seq seq{ static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(fnv1a(user_id)), static_cast<std::uint32_t>(fnv1a(user_id) >> 32) };
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Distribution empirical(const std::map<ClusterLabel, double>& counts, const std::set<ClusterLabel>& states)
{
    double total = 0.0;
    for (const auto& [l, c] : counts) {
        total += c;
    }
    Distribution p;
    for (const auto& l : states) {
        const auto it = counts.find(l);
        p[l] = it == counts.end() ? 0.0 : it->second / total;
    }
    return p;
}

void remap(std::vector<ClusterLabel>& labels, std::span<const ClusterEvent> events)
{
    for (auto& l : labels) {
        l = resolve_label(l, events);
    }
}

SourceRegret& curve_for(std::vector<SourceRegret>& curves, ClusterLabel source)
{
    auto it = std::find_if(curves.begin(), curves.end(), [&](const SourceRegret& c) { return c.source == source; });
    if (it != curves.end()) {
        return *it;
    }
    curves.push_back({ source, {} });
    return curves.back();
}

void record_step(ModelResult& result, const OfflineOracle& oracle, std::size_t i, bool test, ClusterLabel source,
                 ClusterLabel actual, const Prediction& prediction, const StateMap& map)
{
    const ClusterLabel j = oracle.sources[i];
    auto& curve = curve_for(result.regret, j);
    curve.records.push_back(accumulate(curve.records, i, hellinger_split(oracle.p_star.at(j), prediction.distribution, map)));
    result.log.push_back({ i, test, source, actual, j, oracle.dests[i], prediction, map });
}

void finish_models(std::vector<ModelResult>& models)
{
    for (auto& m : models) {
        std::sort(m.regret.begin(), m.regret.end(),
                  [](const SourceRegret& a, const SourceRegret& b) { return a.source < b.source; });
        std::vector<std::optional<ClusterLabel>> choices;
        std::vector<ClusterLabel> actuals;
        for (const auto& e : m.log) {
            if (e.test) {
                choices.push_back(e.prediction.choice);
                actuals.push_back(e.actual);
            }
        }
        m.accuracy = accuracy(choices, actuals);
    }
}

json offline_snapshot(const OfflineClustering& clustering, const ClusterParams& params)
{
    json clusters = json::array();
    for (const auto& label : clustering.live_labels()) {
        if (label.is_outlier()) {
            continue;
        }
        std::vector<GeoPoint> members;
        for (std::size_t i = 0; i < clustering.points().size(); ++i) {
            if (clustering.labels()[i] == label) {
                members.push_back(clustering.points()[i]);
            }
        }
        const std::vector<double> weights(members.size(), 1.0);
        const GeoPoint center = weighted_center(members, weights);
        double radius = 0.0;
        for (const auto& p : members) {
            radius = std::max(radius, haversine_distance(center, p));
        }
        clusters.push_back({ { "label", label.value() },
                             { "lat", center.lat },
                             { "lon", center.lon },
                             { "count", members.size() },
                             { "radius_m", radius } });
    }
    return { { "variant", "offline" }, { "params", params_to_json(params) }, { "clusters", clusters } };
}

json distribution_json(const Distribution& d)
{
    json out = json::object();
    for (const auto& [label, p] : d) {
        out[label.to_string()] = p;
    }
    return out;
}

json log_json(const std::string& user_id, const PredictionLogEntry& e)
{
    json map = json::object();
    for (const auto& [x, target] : e.map.entries()) {
        map[x.to_string()] = target ? json(target->value()) : json(nullptr);
    }
    return { { "user_id", user_id },
             { "step", e.step },
             { "split", e.test ? "test" : "train" },
             { "source", e.source.value() },
             { "actual", e.actual.value() },
             { "choice", e.prediction.choice ? json(e.prediction.choice->value()) : json(nullptr) },
             { "distribution", distribution_json(e.prediction.distribution) },
             { "oracle_source", e.oracle_source.value() },
             { "oracle_dest", e.oracle_dest.value() },
             { "state_map", map } };
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

void write_agreement_row(std::ostream& out, const std::string& user, std::size_t step, const AgreementScores& s)
{
    out << user << ',' << step << ',' << format_number(s.ami) << ',' << format_number(s.ari) << ','
        << format_number(s.v_measure) << '\n';
}

} // namespace

RunConfig RunConfig::from_key_values(const KeyValues& kv)
{
    for (const auto& [key, value] : kv.entries()) {
        if (!kConfigKeys.contains(key)) {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    RunConfig c;
    c.cluster.epsilon_m = kv.get_double("epsilon_m", c.cluster.epsilon_m);
    c.cluster.min_pts = static_cast<int>(kv.get_int("min_pts", c.cluster.min_pts));
    c.cluster.radii_fraction = kv.get_double("radii_fraction", c.cluster.radii_fraction);
    c.cluster.delta = kv.get_double("delta", c.cluster.delta);
    c.cluster.expire_s = kv.get_double("expire_days", c.cluster.expire_s / 86400.0) * 86400.0;
    c.cluster.d_max_m = kv.get_double("d_max_m", c.cluster.d_max_m);
    c.predictor.priors.beta = kv.get_double("prior_beta", c.predictor.priors.beta);
    c.predictor.priors.alpha = kv.get_double("prior_alpha", c.predictor.priors.alpha);
    c.predictor.eta = kv.get_double("eta", c.predictor.eta);
    c.predictor.expert.smoothing = kv.get_double("expert_smoothing", c.predictor.expert.smoothing);
    c.predictor.expert.random_fallback = kv.get_bool("expert_random_fallback", false);
    if (auto models = kv.get("models")) {
        c.models = parse_model_list(*models);
    }
    if (auto variant = kv.get("variant")) {
        c.variant = parse_cluster_variant(*variant);
    }
    c.split = kv.get_double("split", c.split);
    const auto seed = kv.get_int("seed", static_cast<long long>(c.seed));
    if (seed < 0) {
        throw std::invalid_argument("seed must be non-negative");
    }
    c.seed = static_cast<std::uint64_t>(seed);
    c.threads = static_cast<int>(kv.get_int("threads", c.threads));
    c.validate();
    return c;
}

void RunConfig::validate() const
{
    cluster.validate();
    if (!(split > 0.0 && split < 1.0)) {
        throw std::invalid_argument("split must lie in (0, 1)");
    }
    if (!(predictor.priors.beta >= 0.0) || !(predictor.priors.alpha >= 0.0)) {
        throw std::invalid_argument("priors must be non-negative");
    }
    if (!(predictor.eta > 0.0)) {
        throw std::invalid_argument("eta must be positive");
    }
    if (!(predictor.expert.smoothing >= 0.0)) {
        throw std::invalid_argument("expert_smoothing must be non-negative");
    }
    if (models.empty()) {
        throw std::invalid_argument("no models configured");
    }
    if (threads < 1) {
        throw std::invalid_argument("threads must be at least 1");
    }
}

json RunConfig::to_json() const
{
    json names = json::array();
    for (auto m : models) {
        names.push_back(to_string(m));
    }
    return { { "cluster", params_to_json(cluster) },
             { "prior_beta", predictor.priors.beta },
             { "prior_alpha", predictor.priors.alpha },
             { "eta", predictor.eta },
             { "expert_smoothing", predictor.expert.smoothing },
             { "expert_random_fallback", predictor.expert.random_fallback },
             { "models", names },
             { "variant", to_string(variant) },
             { "split", split },
             { "seed", seed } };
}

OfflineOracle OfflineOracle::build(std::span<const Trip> trips, const ClusterParams& params)
{
    OfflineOracle o;
    std::vector<GeoPoint> points;
    points.reserve(trips.size());
    for (const auto& t : trips) {
        points.push_back(t.dest);
    }
    o.clustering = OfflineClustering(std::move(points), params);
    o.dests = o.clustering.labels();
    std::map<ClusterLabel, std::map<ClusterLabel, double>> counts;
    for (std::size_t i = 0; i < trips.size(); ++i) {
        o.sources.push_back(assign_source_label(o.clustering.distances_to_clusters(trips[i].source), params));
        counts[o.sources.back()][o.dests[i]] += 1.0;
    }
    auto states = o.clustering.live_labels();
    states.insert(ClusterLabel::outlier());
    for (const auto& [source, row] : counts) {
        o.p_star[source] = empirical(row, states);
    }
    return o;
}

OnlineSession::OnlineSession(const RunConfig& config, std::uint64_t user_seed)
    : clusterer_{ make_online_clusterer(config.variant, config.cluster) }
{
    auto options = config.predictor;
    options.expert.seed = user_seed;
    for (auto kind : config.models) {
        models_.push_back(make_predictor(kind, options));
    }
}

OnlineSession::Step OnlineSession::predict(const Trip& trip) const
{
    Step step;
    step.source = assign_source_label(clusterer_->distances_to_clusters(trip.source), clusterer_->params());
    for (const auto& m : models_) {
        step.predictions.push_back(m->predict(step.source));
    }
    return step;
}

Observation OnlineSession::observe(const Trip& trip, ClusterLabel source)
{
    auto obs = clusterer_->observe(trip.dest, trip.t_end);
    for (auto& m : models_) {
        m->update(source, obs.label, obs.events);
    }
    return obs;
}

json OnlineSession::snapshot() const
{
    json models = json::object();
    for (const auto& m : models_) {
        models[to_string(m->kind())] = m->snapshot();
    }
    return { { "variant", to_string(clusterer_->variant()) }, { "clusterer", clusterer_->snapshot() }, { "models", models } };
}

std::size_t train_size(std::size_t trips, double split)
{
    return static_cast<std::size_t>(std::floor(static_cast<double>(trips) * split));
}

UserResult run_user(const std::string& user_id, std::span<const Trip> trips, const RunConfig& config)
{
    UserResult result;
    result.user_id = user_id;
    result.trips = trips.size();
    result.train = train_size(trips.size(), config.split);
    for (auto kind : config.models) {
        result.models.push_back({ kind, {}, {}, {} });
    }
    const auto oracle = OfflineOracle::build(trips, config.cluster);
    const std::uint64_t seed = user_seed(user_id, config.seed);

    std::vector<ClusterLabel> final_labels;
    if (config.variant == ClusterVariant::Offline) {
        const auto train = trips.first(result.train);
        std::vector<GeoPoint> points;
        for (const auto& t : train) {
            points.push_back(t.dest);
        }
        const OfflineClustering clustering(std::move(points), config.cluster);
        std::vector<Transition> transitions;
        for (std::size_t i = 0; i < train.size(); ++i) {
            transitions.push_back(
                { assign_source_label(clustering.distances_to_clusters(train[i].source), config.cluster),
                  clustering.labels()[i] });
        }
        const auto labels = clustering.live_labels();
        auto options = config.predictor;
        options.expert.seed = seed;
        std::vector<std::unique_ptr<Predictor>> models;
        json model_snapshots = json::object();
        for (auto kind : config.models) {
            models.push_back(make_predictor(kind, options));
            models.back()->fit(labels, transitions);
            model_snapshots[to_string(kind)] = models.back()->snapshot();
        }
        final_labels = clustering.labels();
        for (std::size_t i = train.size(); i < trips.size(); ++i) {
            final_labels.push_back(clustering.classify(trips[i].dest));
        }
        const auto map = build_state_map(std::span(oracle.dests).first(train.size()), clustering.labels());
        for (std::size_t i = train.size(); i < trips.size(); ++i) {
            const auto source = assign_source_label(clustering.distances_to_clusters(trips[i].source), config.cluster);
            for (std::size_t m = 0; m < models.size(); ++m) {
                record_step(result.models[m], oracle, i, true, source, final_labels[i], models[m]->predict(source), map);
            }
        }
        result.clusters = std::count_if(labels.begin(), labels.end(), [](ClusterLabel l) { return !l.is_outlier(); });
        result.snapshot = { { "variant", "offline" },
                            { "clusterer", offline_snapshot(clustering, config.cluster) },
                            { "models", model_snapshots } };
    } else {
        OnlineSession session(config, seed);
        std::vector<ClusterLabel> observed;
        StateMap map;
        bool stale = true;
        for (std::size_t i = 0; i < trips.size(); ++i) {
            if (stale) {
                std::vector<ClusterLabel> online;
                for (std::size_t h = 0; h < i; ++h) {
                    online.push_back(session.clusterer().classify(trips[h].dest));
                }
                map = build_state_map(std::span(oracle.dests).first(i), online);
                stale = false;
            }
            const auto step = session.predict(trips[i]);
            const auto obs = session.observe(trips[i], step.source);
            const bool test = i >= result.train;
            for (std::size_t m = 0; m < result.models.size(); ++m) {
                record_step(result.models[m], oracle, i, test, step.source, obs.label, step.predictions[m], map);
            }
            remap(observed, obs.events);
            observed.push_back(obs.label);
            stale = !obs.events.empty();
            result.agreement.push_back(
                { i, clustering_agreement(observed, std::span(oracle.dests).first(i + 1)) });
        }
        for (const auto& t : trips) {
            final_labels.push_back(session.clusterer().classify(t.dest));
        }
        const auto& live = session.clusterer().live_labels();
        result.clusters = std::count_if(live.begin(), live.end(), [](ClusterLabel l) { return !l.is_outlier(); });
        result.snapshot = session.snapshot();
    }
    finish_models(result.models);
    result.final_agreement = clustering_agreement(final_labels, oracle.dests);
    result.snapshot["user_id"] = user_id;
    return result;
}

std::vector<UserResult> run_corpus(const Corpus& corpus, const RunConfig& config)
{
    config.validate();
    std::vector<const std::pair<const std::string, std::vector<Trip>>*> users;
    for (const auto& entry : corpus) {
        users.push_back(&entry);
    }
    std::vector<UserResult> results(users.size());
    std::vector<std::exception_ptr> errors(users.size());
    std::atomic<std::size_t> next{ 0 };
    auto worker = [&] {
        for (std::size_t i = next++; i < users.size(); i = next++) {
            try {
                results[i] = run_user(users[i]->first, users[i]->second, config);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), users.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

RunSummary summarize(const std::vector<UserResult>& results)
{
    RunSummary s;
    s.users = results.size();
    std::map<ModelKind, std::pair<double, int>> all;
    std::map<ModelKind, std::pair<double, int>> clustered;
    for (const auto& r : results) {
        s.mean_final_agreement.ami += r.final_agreement.ami;
        s.mean_final_agreement.ari += r.final_agreement.ari;
        s.mean_final_agreement.v_measure += r.final_agreement.v_measure;
        for (const auto& m : r.models) {
            if (m.accuracy.acc_all) {
                all[m.kind].first += *m.accuracy.acc_all;
                ++all[m.kind].second;
            }
            if (m.accuracy.acc_clustered) {
                clustered[m.kind].first += *m.accuracy.acc_clustered;
                ++clustered[m.kind].second;
            }
        }
    }
    if (s.users > 0) {
        const double n = static_cast<double>(s.users);
        s.mean_final_agreement.ami /= n;
        s.mean_final_agreement.ari /= n;
        s.mean_final_agreement.v_measure /= n;
    }
    for (const auto& [kind, acc] : all) {
        s.mean_acc_all[kind] = acc.first / acc.second;
    }
    for (const auto& [kind, acc] : clustered) {
        s.mean_acc_clustered[kind] = acc.first / acc.second;
    }
    return s;
}

void write_reports(const std::filesystem::path& out_dir, const std::vector<UserResult>& results,
                   const RunConfig& config)
{
    std::filesystem::create_directories(out_dir / "snapshots");
    const std::string variant = to_string(config.variant);

    auto acc = open_out(out_dir / "accuracy.csv");
    acc << "user_id,model,variant,acc_all,acc_clustered\n";
    auto agreement = open_out(out_dir / "agreement.csv");
    auto agreement_final = open_out(out_dir / "agreement_final.csv");
    agreement << "user_id,step,ami,ari,v_measure\n";
    agreement_final << "user_id,step,ami,ari,v_measure\n";
    for (const auto& r : results) {
        for (const auto& m : r.models) {
            acc << r.user_id << ',' << to_string(m.kind) << ',' << variant << ','
                << format_optional(m.accuracy.acc_all) << ',' << format_optional(m.accuracy.acc_clustered) << '\n';
        }
        for (const auto& row : r.agreement) {
            write_agreement_row(agreement, r.user_id, row.step, row.scores);
        }
        if (r.trips > 0) {
            write_agreement_row(agreement_final, r.user_id, r.trips - 1, r.final_agreement);
        }
        auto snap = open_out(out_dir / "snapshots" / (r.user_id + ".json"));
        snap << r.snapshot.dump(2) << '\n';
    }

    for (std::size_t m = 0; m < config.models.size(); ++m) {
        const auto name = to_string(config.models[m]);
        auto regret = open_out(out_dir / ("regret_" + name + ".csv"));
        auto orphans = open_out(out_dir / ("orphans_" + name + ".csv"));
        auto log = open_out(out_dir / ("predictions_" + name + ".jsonl"));
        regret << "user_id,source_label,step,h2,h2_d,h2_s,cum_regret,cum_h2_d,cum_h2_s\n";
        orphans << "user_id,source_label,step,orphan_mass\n";
        for (const auto& r : results) {
            const auto& model = r.models.at(m);
            for (const auto& curve : model.regret) {
                for (const auto& rec : curve.records) {
                    regret << r.user_id << ',' << curve.source.value() << ',' << rec.step << ','
                           << format_number(rec.h2) << ',' << format_number(rec.h2_d) << ','
                           << format_number(rec.h2_s) << ',' << format_number(rec.cum_regret) << ','
                           << format_number(rec.cum_h2_d) << ',' << format_number(rec.cum_h2_s) << '\n';
                    orphans << r.user_id << ',' << curve.source.value() << ',' << rec.step << ','
                            << format_number(rec.orphan_mass) << '\n';
                }
            }
            for (const auto& e : model.log) {
                log << log_json(r.user_id, e).dump() << '\n';
            }
        }
    }

    const auto s = summarize(results);
    json models = json::object();
    for (auto kind : config.models) {
        json entry = json::object();
        if (s.mean_acc_all.contains(kind)) {
            entry["mean_acc_all"] = s.mean_acc_all.at(kind);
        }
        if (s.mean_acc_clustered.contains(kind)) {
            entry["mean_acc_clustered"] = s.mean_acc_clustered.at(kind);
        }
        models[to_string(kind)] = entry;
    }
    json summary = { { "config", config.to_json() },
                     { "users", s.users },
                     { "models", models },
                     { "mean_final_agreement",
                       { { "ami", s.mean_final_agreement.ami },
                         { "ari", s.mean_final_agreement.ari },
                         { "v_measure", s.mean_final_agreement.v_measure } } } };
    auto out = open_out(out_dir / "summary.json");
    out << summary.dump(2) << '\n';
}

} // namespace tripcast
