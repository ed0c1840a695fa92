#include "tripcast/snapshot.hpp"

#include "tripcast/csv_io.hpp"
#include "tripcast/online_cluster.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tripcast {

using nlohmann::json;

namespace {

struct ClusterRow
{
    int centroids{ 0 };
    long count{ 0 };
    double radius_m{ 0.0 };
};

void summarize_clusters(const json& clusterer, std::ostream& out)
{
    const auto variant = clusterer.value("variant", std::string{});
    if (variant == "v1" || variant == "v2") {
        try {
            online_clusterer_from_snapshot(clusterer);
        } catch (const std::exception& e) {
            throw SnapshotError(std::string("invalid clusterer snapshot: ") + e.what());
        }
    }
    std::map<int, ClusterRow> rows;
    const auto entries = clusterer.contains("centroids") ? clusterer.at("centroids")
                                                         : clusterer.value("clusters", json::array());
    if (!entries.is_array()) {
        throw SnapshotError("cluster list is not an array");
    }
    for (const auto& c : entries) {
        auto& row = rows[c.at("label").get<int>()];
        ++row.centroids;
        row.count += c.at("count").get<long>();
        row.radius_m = std::max(row.radius_m, c.value("radius_m", 0.0));
    }
    if (!variant.empty()) {
        out << "variant " << variant << '\n';
    }
    out << rows.size() << (rows.size() == 1 ? " cluster\n" : " clusters\n");
    if (!rows.empty()) {
        out << "  label  centroids  count  radius_m\n";
        for (const auto& [label, row] : rows) {
            out << "  " << label << "  " << row.centroids << "  " << row.count << "  " << format_number(row.radius_m)
                << '\n';
        }
    }
    if (clusterer.contains("pending")) {
        out << "pending " << clusterer.at("pending").size() << '\n';
    }
}

void summarize_model(const std::string& name, const json& model, std::ostream& out)
{
    out << "model " << name << '\n';
    const auto global = model.value("global", json::object());
    out << "  global:";
    for (const auto& [label, value] : global.items()) {
        if (value.is_object()) {
            out << ' ' << label << "(z=" << value.at("z").get<long>() << ",n=" << value.at("n").get<long>() << ')';
        } else {
            out << ' ' << label << '=' << format_number(value.get<double>());
        }
    }
    out << '\n';
    out << "  sources: " << model.value("conditionals", json::object()).size() << '\n';
}

} // namespace

json load_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw SnapshotError("cannot read " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SnapshotError("corrupt snapshot " + path.string() + ": " + e.what());
    }
}

std::string inspect_summary(const json& snapshot)
{
    if (!snapshot.is_object()) {
        throw SnapshotError("snapshot must be a JSON object");
    }
    std::ostringstream out;
    try {
        if (snapshot.contains("user_id")) {
            out << "user " << snapshot.at("user_id").get<std::string>() << '\n';
        }
        summarize_clusters(snapshot.contains("clusterer") ? snapshot.at("clusterer") : snapshot, out);
        const auto models = snapshot.value("models", json::object());
        for (const auto& [name, model] : models.items()) {
            summarize_model(name, model, out);
        }
    } catch (const json::exception& e) {
        throw SnapshotError(std::string("malformed snapshot: ") + e.what());
    }
    return out.str();
}

} // namespace tripcast
