// tripcast: ingest GPS logs, generate synthetic corpora, run the prediction
// pipeline and inspect saved state.

#include "tripcast/csv_io.hpp"
#include "tripcast/ingest.hpp"
#include "tripcast/keyvalue.hpp"
#include "tripcast/pipeline.hpp"
#include "tripcast/snapshot.hpp"
#include "tripcast/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tripcast;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;

// Raised for bad configuration or arguments; maps to the usage exit code.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct CommonOptions
{
    std::string config;
    std::vector<std::string> sets;
    std::string out{ "." };
    std::optional<long long> seed;
};

KeyValues load_config(const CommonOptions& opts)
{
    KeyValues kv;
    try {
        if (!opts.config.empty()) {
            kv = KeyValues::load(opts.config);
        }
        for (const auto& s : opts.sets) {
            kv.set_from_assignment(s);
        }
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (opts.seed) {
        kv.set("seed", std::to_string(*opts.seed));
    }
    return kv;
}

std::string percent(std::size_t kept, std::size_t total)
{
    if (total == 0) {
        return "n/a";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * static_cast<double>(kept) / static_cast<double>(total));
    return buf;
}

std::pair<TripExtractionOptions, CorpusFilterOptions> ingest_options(const KeyValues& kv)
{
    static const std::set<std::string> known = {
        "fix_gap_s",      "stop_speed_kmh", "stop_duration_s", "merge_gap_s",   "distance_mode",
        "min_distance_m", "min_duration_s", "min_span_days",   "min_trips_per_day",
    };
    for (const auto& [key, value] : kv.entries()) {
        if (!known.contains(key) && key != "seed") {
            throw UsageError("unknown ingest config key '" + key + "'");
        }
    }
    TripExtractionOptions ex;
    CorpusFilterOptions filter;
    try {
        ex.fix_gap_s = kv.get_double("fix_gap_s", ex.fix_gap_s);
        ex.stop_speed_kmh = kv.get_double("stop_speed_kmh", ex.stop_speed_kmh);
        ex.stop_duration_s = kv.get_double("stop_duration_s", ex.stop_duration_s);
        ex.merge_gap_s = kv.get_double("merge_gap_s", ex.merge_gap_s);
        const auto mode = kv.get_string("distance_mode", "polyline");
        if (mode == "polyline") {
            ex.distance_mode = DistanceMode::Polyline;
        } else if (mode == "straight") {
            ex.distance_mode = DistanceMode::StraightLine;
        } else {
            throw std::invalid_argument("distance_mode must be 'polyline' or 'straight'");
        }
        filter.min_distance_m = kv.get_double("min_distance_m", filter.min_distance_m);
        filter.min_duration_s = kv.get_double("min_duration_s", filter.min_duration_s);
        filter.min_span_days = kv.get_double("min_span_days", filter.min_span_days);
        filter.min_trips_per_day = kv.get_double("min_trips_per_day", filter.min_trips_per_day);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return { ex, filter };
}

int cmd_ingest(const std::string& input, const CommonOptions& opts)
{
    const auto [ex, filter] = ingest_options(load_config(opts));
    const auto fixes = read_fixes(fs::path(input));
    if (fixes.skipped > 0) {
        std::cerr << "warning: skipped " << fixes.skipped << " malformed row(s)\n";
    }
    Corpus extracted;
    for (const auto& [user, user_fixes] : group_fixes_by_user(fixes.rows)) {
        extracted[user] = extract_trips(user_fixes, ex);
    }
    const Corpus kept = filter_corpus(extracted, filter);
    fs::create_directories(opts.out);
    write_trips(fs::path(opts.out) / "trips.csv", kept);

    const auto trips_before = trip_count(extracted);
    const auto trips_after = trip_count(kept);
    std::cout << "fixes read: " << fixes.rows.size() << '\n'
              << "trips retained: " << trips_after << "/" << trips_before << " (" << percent(trips_after, trips_before)
              << ")\n"
              << "users retained: " << kept.size() << "/" << extracted.size() << " ("
              << percent(kept.size(), extracted.size()) << ")\n";
    return kOk;
}

int cmd_synth(const CommonOptions& opts)
{
    SynthSpec spec;
    try {
        spec = SynthSpec::from_key_values(load_config(opts));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto corpus = generate_synthetic(spec, spec.seed);
    fs::create_directories(opts.out);
    write_trips(fs::path(opts.out) / "trips.csv", corpus.trips);
    std::ofstream truth(fs::path(opts.out) / "truth.json", std::ios::binary);
    truth << truth_to_json(corpus).dump(2) << '\n';
    if (!truth) {
        throw std::runtime_error("cannot write truth.json");
    }
    std::cout << "users: " << corpus.trips.size() << "\ntrips: " << trip_count(corpus.trips) << '\n';
    return kOk;
}

int cmd_run(const std::string& input, const CommonOptions& opts)
{
    RunConfig config;
    try {
        config = RunConfig::from_key_values(load_config(opts));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto trips = read_trips(fs::path(input));
    if (trips.skipped > 0) {
        std::cerr << "warning: skipped " << trips.skipped << " malformed row(s)\n";
    }
    const auto results = run_corpus(trips.rows, config);
    write_reports(opts.out, results, config);
    const auto summary = summarize(results);
    std::cout << "users: " << summary.users << "  variant: " << to_string(config.variant) << '\n';
    for (const auto& [kind, acc] : summary.mean_acc_all) {
        std::cout << to_string(kind) << ": acc_all " << format_number(acc);
        if (summary.mean_acc_clustered.contains(kind)) {
            std::cout << "  acc_clustered " << format_number(summary.mean_acc_clustered.at(kind));
        }
        std::cout << '\n';
    }
    return kOk;
}

int cmd_inspect(const std::string& input)
{
    std::cout << inspect_summary(load_snapshot(input));
    return kOk;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_out)
{
    cmd->add_option("--config", opts.config, "key=value configuration file");
    cmd->add_option("--set", opts.sets, "override one key=value setting (repeatable)")
        ->take_all()
        ->allow_extra_args(false);
    if (with_out) {
        cmd->add_option("--out", opts.out, "output directory");
    }
    cmd->add_option("--seed", opts.seed, "random seed");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{ "Online trip destination clustering, prediction and evaluation" };
    app.require_subcommand(1);

    CommonOptions opts;
    std::string input;

    auto* ingest = app.add_subcommand("ingest", "extract and filter trips from raw GPS fixes");
    ingest->add_option("fixes", input, "raw fix CSV")->required();
    add_common(ingest, opts, true);

    auto* synth = app.add_subcommand("synth", "generate a synthetic trip corpus with ground truth");
    add_common(synth, opts, true);

    auto* run = app.add_subcommand("run", "cluster, predict and evaluate a trip corpus");
    run->add_option("trips", input, "trip CSV")->required();
    add_common(run, opts, true);

    auto* inspect = app.add_subcommand("inspect", "summarize a saved state snapshot");
    inspect->add_option("snapshot", input, "snapshot JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*ingest) {
            return cmd_ingest(input, opts);
        }
        if (*synth) {
            return cmd_synth(opts);
        }
        if (*run) {
            return cmd_run(input, opts);
        }
        return cmd_inspect(input);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
}
