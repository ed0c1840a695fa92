// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exits nonzero if any criterion fails.

#include "brute_dbscan.hpp"

#include "tripcast/agreement.hpp"
#include "tripcast/bayes.hpp"
#include "tripcast/clustering.hpp"
#include "tripcast/hellinger.hpp"
#include "tripcast/online_cluster.hpp"
#include "tripcast/pipeline.hpp"
#include "tripcast/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tripcast;
namespace fs = std::filesystem;

namespace {

constexpr double kDominanceTol = 1e-12;
constexpr double kParityPoints = 3.0;
constexpr double kDominanceShare = 0.8;
constexpr double kSublinearShare = 0.9;
constexpr double kAgreementFloor = 0.9;
constexpr std::size_t kMinStream = 40;

const GeoPoint kOrigin{ 57.7089, 11.9746 };

struct Outcome
{
    bool pass{ false };
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Outcome conjugacy()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    int mismatches = 0;
    for (int stream = 0; stream < 100; ++stream) {
        const int k = 1 + static_cast<int>(rng() % 8);
        const int n = 20 + static_cast<int>(rng() % 300);
        std::uniform_int_distribution<int> lab(-1, k - 1);
        std::uniform_real_distribution<double> prior(0.0, 3.0);
        const Priors priors{ prior(rng), prior(rng) };
        std::vector<Transition> ts;
        std::set<ClusterLabel> labels{ ClusterLabel::outlier() };
        std::vector<ClusterEvent> create;
        for (int j = 0; j < k; ++j) {
            labels.insert(ClusterLabel(j));
            create.push_back(NewCluster{ ClusterLabel(j) });
        }
        for (int i = 0; i < n; ++i) {
            ts.push_back({ ClusterLabel(lab(rng)), ClusterLabel(lab(rng)) });
        }
        BayesianModel seq(priors);
        seq.apply_events(create);
        for (const auto& t : ts) {
            seq.update(t);
        }
        if (!(seq == BayesianModel::fit_offline(ts, labels, priors))) {
            ++mismatches;
        }
    }
    const double elapsed = seconds_since(start);
    return { mismatches == 0 && elapsed < 1.0,
             fmt("%d/100 streams differ, %.3f s (limit 1 s)", mismatches, elapsed) };
}

// Independent evaluation of H^2 and H^2_d for one offline-to-online map.
struct RawSplit
{
    double h2{ 0.0 };
    double h2_d{ 0.0 };
};

RawSplit raw_split(const std::vector<double>& p, const std::vector<double>& q, const std::vector<int>& f)
{
    std::vector<int> fibre(q.size(), 0);
    for (int t : f) {
        ++fibre[t];
    }
    RawSplit out;
    std::vector<double> image(q.size(), 0.0);
    for (std::size_t x = 0; x < p.size(); ++x) {
        const double d = std::sqrt(p[x]) - std::sqrt(q[f[x]] / fibre[f[x]]);
        out.h2 += 0.5 * d * d;
        image[f[x]] += p[x];
    }
    for (std::size_t t = 0; t < q.size(); ++t) {
        if (fibre[t] > 0) {
            const double d = std::sqrt(image[t]) - std::sqrt(q[t]);
            out.h2_d += 0.5 * d * d;
        }
    }
    return out;
}

Outcome dominance_of_h2()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    int disagreements = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 10000; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 10);
        const int m = 1 + static_cast<int>(rng() % k);
        std::vector<double> p(k);
        std::vector<double> q(m);
        std::vector<int> f(k);
        double sp = 0.0;
        double sq = 0.0;
        for (auto& v : p) {
            v = u(rng);
            sp += v;
        }
        for (auto& v : q) {
            v = u(rng);
            sq += v;
        }
        for (int x = 0; x < k; ++x) {
            // Every online state is hit at least once.
            f[x] = x < m ? x : static_cast<int>(rng() % m);
        }
        std::shuffle(f.begin(), f.end(), rng);
        Distribution dp;
        Distribution dq;
        std::map<ClusterLabel, std::optional<ClusterLabel>> fm;
        for (int x = 0; x < k; ++x) {
            p[x] /= sp;
            dp[ClusterLabel(x)] = p[x];
            fm[ClusterLabel(x)] = ClusterLabel(f[x]);
        }
        for (int t = 0; t < m; ++t) {
            q[t] /= sq;
            dq[ClusterLabel(t)] = q[t];
        }
        const auto raw = raw_split(p, q, f);
        const auto lib = hellinger_split(dp, dq, StateMap{ fm });
        const double gap = raw.h2 - raw.h2_d;
        worst = std::min(worst, gap);
        if (gap < -kDominanceTol) {
            ++violations;
        }
        if (std::abs(lib.h2 - raw.h2) > 1e-12 || std::abs(lib.h2_d - raw.h2_d) > 1e-12) {
            ++disagreements;
        }
    }
    const double elapsed = seconds_since(start);
    return { violations == 0 && disagreements == 0 && elapsed < 5.0,
             fmt("%d violations, min H2-H2_d %.3g, %d library mismatches, %.3f s (limit 5 s)", violations, worst,
                 disagreements, elapsed) };
}

Outcome tiny_radius()
{
    const auto start = Clock::now();
    ClusterParams params;
    params.epsilon_m = 100.0;
    params.min_pts = 3;
    params.radii_fraction = 1e-9 / params.epsilon_m;
    params.expire_s = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(303);
    std::normal_distribution<double> noise(0.0, 25.0);
    std::uniform_real_distribution<double> area(-3000.0, 3000.0);
    double worst = 1.0;
    for (int stream = 0; stream < 20; ++stream) {
        const int k = 2 + static_cast<int>(rng() % 5);
        std::vector<GeoPoint> centers;
        for (int j = 0; j < k; ++j) {
            // Centers 1 km apart leave gaps far above 3 epsilon.
            centers.push_back(offset_by_meters(kOrigin, 1000.0 * j, 1000.0 * (j % 2)));
        }
        OnlineClusterV1 online(params);
        std::vector<GeoPoint> pts;
        const int n = 100 + static_cast<int>(rng() % 200);
        for (int i = 0; i < n; ++i) {
            if (rng() % 20 == 0) {
                pts.push_back(offset_by_meters(kOrigin, area(rng), area(rng)));
            } else {
                pts.push_back(offset_by_meters(centers[rng() % k], noise(rng), noise(rng)));
            }
            online.observe(pts.back(), i);
        }
        // With r -> 0 every clustered point sits on a centroid of its cluster.
        std::vector<ClusterLabel> member;
        for (const auto& p : pts) {
            ClusterLabel label = ClusterLabel::outlier();
            for (const auto& c : online.centroids()) {
                if (haversine_distance(p, c.center) < 1e-6) {
                    label = c.label;
                }
            }
            member.push_back(label);
        }
        worst = std::min(worst, adjusted_rand_index(member, offline_dbscan(pts, params)));
    }
    const double elapsed = seconds_since(start);
    return { worst == 1.0 && elapsed < 10.0, fmt("min ARI %.17g over 20 streams, %.3f s (limit 10 s)", worst, elapsed) };
}

Outcome dbscan_oracle()
{
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> area(-800.0, 800.0);
    int mismatches = 0;
    for (int instance = 0; instance < 50; ++instance) {
        const int n = 1 + static_cast<int>(rng() % 200);
        ClusterParams params;
        params.epsilon_m = 40.0 + static_cast<double>(rng() % 80);
        params.min_pts = 2 + static_cast<int>(rng() % 4);
        std::vector<GeoPoint> pts;
        for (int i = 0; i < n; ++i) {
            pts.push_back(offset_by_meters(kOrigin, area(rng), area(rng)));
        }
        const auto got = tripcast::testing::values(offline_dbscan(pts, params));
        const auto want = tripcast::testing::brute_force_dbscan(pts, params.epsilon_m, params.min_pts);
        if (!tripcast::testing::same_partition(got, want)) {
            ++mismatches;
        }
    }
    return { mismatches == 0, fmt("%d/50 instances differ", mismatches) };
}

const ModelResult& model(const UserResult& r, ModelKind kind)
{
    for (const auto& m : r.models) {
        if (m.kind == kind) {
            return m;
        }
    }
    throw std::logic_error("model missing from run");
}

double final_regret(const ModelResult& m, ClusterLabel source)
{
    for (const auto& curve : m.regret) {
        if (curve.source == source) {
            return curve.records.empty() ? 0.0 : curve.records.back().cum_regret;
        }
    }
    return 0.0;
}

Outcome dominance(const std::vector<UserResult>& results)
{
    int pairs = 0;
    int bayes_wins = 0;
    int expert_wins = 0;
    for (const auto& r : results) {
        const auto& greedy = model(r, ModelKind::Greedy);
        const auto& flat = model(r, ModelKind::Unconditioned);
        for (const auto& curve : model(r, ModelKind::Bayes).regret) {
            if (curve.records.size() < kMinStream) {
                continue;
            }
            ++pairs;
            const double g = final_regret(greedy, curve.source);
            const double u = final_regret(flat, curve.source);
            const double b = curve.records.back().cum_regret;
            const double e = final_regret(model(r, ModelKind::Expert), curve.source);
            bayes_wins += b < g && b < u ? 1 : 0;
            expert_wins += e < g && e < u ? 1 : 0;
        }
    }
    const double bs = pairs ? static_cast<double>(bayes_wins) / pairs : 0.0;
    const double es = pairs ? static_cast<double>(expert_wins) / pairs : 0.0;
    return { pairs > 0 && bs >= kDominanceShare && es >= kDominanceShare,
             fmt("bayes %.3f, expert %.3f of %d pairs (need %.2f)", bs, es, pairs, kDominanceShare) };
}

Outcome sublinear(const std::vector<UserResult>& results)
{
    auto share = [&](ModelKind kind, int& streams) {
        int below = 0;
        streams = 0;
        for (const auto& r : results) {
            for (const auto& curve : model(r, kind).regret) {
                const auto n = curve.records.size();
                if (n < kMinStream) {
                    continue;
                }
                const auto quarter = n / 4;
                double first = 0.0;
                double last = 0.0;
                for (std::size_t i = 0; i < quarter; ++i) {
                    first += curve.records[i].h2;
                    last += curve.records[n - quarter + i].h2;
                }
                ++streams;
                below += last < first ? 1 : 0;
            }
        }
        return streams ? static_cast<double>(below) / streams : 0.0;
    };
    int streams = 0;
    int expert_streams = 0;
    const double bayes = share(ModelKind::Bayes, streams);
    const double expert = share(ModelKind::Expert, expert_streams);
    return { streams > 0 && bayes >= kSublinearShare,
             fmt("bayes %.3f of %d streams (need %.2f); expert %.3f", bayes, streams, kSublinearShare, expert) };
}

Outcome agreement(const std::vector<UserResult>& results)
{
    const auto s = summarize(results).mean_final_agreement;
    return { s.ami >= kAgreementFloor && s.ari >= kAgreementFloor && s.v_measure >= kAgreementFloor,
             fmt("AMI %.4f ARI %.4f V %.4f (need %.2f)", s.ami, s.ari, s.v_measure, kAgreementFloor) };
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism(const Corpus& corpus, const RunConfig& config)
{
    const auto root = fs::temp_directory_path() / "tripcast_acceptance";
    fs::remove_all(root);
    write_reports(root / "a", run_corpus(corpus, config), config);
    write_reports(root / "b", run_corpus(corpus, config), config);
    int files = 0;
    int differ = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        if (entry.path().extension() != ".csv") {
            continue;
        }
        ++files;
        if (slurp(entry.path()) != slurp(root / "b" / entry.path().filename())) {
            ++differ;
        }
    }
    fs::remove_all(root);
    return { files > 0 && differ == 0, fmt("%d/%d CSV files differ", differ, files) };
}

} // namespace

int main()
{
    int failures = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };

    report(1, "conjugacy order-invariance", conjugacy());
    report(2, "H2 dominates H2_d", dominance_of_h2());
    report(3, "tiny-radius V1 equals DBSCAN", tiny_radius());

    SynthSpec spec;
    spec.users = 100;
    spec.trips_per_user = 160;
    const auto corpus = generate_synthetic(spec, 404).trips;
    RunConfig v1;
    v1.threads = 4;
    RunConfig v2 = v1;
    v2.variant = ClusterVariant::V2;
    RunConfig offline = v1;
    offline.variant = ClusterVariant::Offline;

    const auto start = Clock::now();
    const auto v1_results = run_corpus(corpus, v1);
    const auto v2_results = run_corpus(corpus, v2);
    const auto offline_results = run_corpus(corpus, offline);
    const double elapsed = seconds_since(start);
    const double acc_v1 = 100.0 * summarize(v1_results).mean_acc_all.at(ModelKind::Bayes);
    const double acc_v2 = 100.0 * summarize(v2_results).mean_acc_all.at(ModelKind::Bayes);
    const double acc_off = 100.0 * summarize(offline_results).mean_acc_all.at(ModelKind::Bayes);
    const double gap = std::min(std::abs(acc_v1 - acc_off), std::abs(acc_v2 - acc_off));
    report(4, "online/offline accuracy parity",
           { gap <= kParityPoints && elapsed < 60.0,
             fmt("v1 %.2f%%, v2 %.2f%%, offline %.2f%%, gap %.2f points (limit %.0f), %.2f s (limit 60 s)", acc_v1,
                 acc_v2, acc_off, gap, kParityPoints, elapsed) });
    report(5, "regret dominance", dominance(v1_results));
    report(6, "regret sublinearity", sublinear(v1_results));
    report(7, "V1 agreement with offline clustering", agreement(v1_results));
    report(8, "DBSCAN matches brute-force oracle", dbscan_oracle());
    report(9, "deterministic reports", determinism(corpus, v1));

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
