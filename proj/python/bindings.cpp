#include "tripcast/agreement.hpp"
#include "tripcast/bayes.hpp"
#include "tripcast/csv_io.hpp"
#include "tripcast/experts.hpp"
#include "tripcast/hellinger.hpp"
#include "tripcast/online_cluster.hpp"
#include "tripcast/pipeline.hpp"
#include "tripcast/synth.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

namespace py = pybind11;
using namespace tripcast;

namespace {

// Labels cross the boundary as plain ints, -1 for Outlier.
std::vector<int> to_ints(const std::vector<ClusterLabel>& labels)
{
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        out.push_back(l.value());
    }
    return out;
}

std::vector<ClusterLabel> to_labels(const std::vector<int>& values)
{
    std::vector<ClusterLabel> out;
    out.reserve(values.size());
    for (int v : values) {
        out.emplace_back(v);
    }
    return out;
}

Distribution to_distribution(const std::map<int, double>& d)
{
    Distribution out;
    for (const auto& [label, p] : d) {
        out[ClusterLabel{ label }] = p;
    }
    return out;
}

std::map<int, double> from_distribution(const Distribution& d)
{
    std::map<int, double> out;
    for (const auto& [label, p] : d) {
        out[label.value()] = p;
    }
    return out;
}

py::dict prediction_dict(const Prediction& p)
{
    py::dict out;
    out["distribution"] = from_distribution(p.distribution);
    out["choice"] = p.choice ? py::object(py::int_(p.choice->value())) : py::object(py::none());
    return out;
}

std::vector<ClusterEvent> to_events(const py::list& events)
{
    std::vector<ClusterEvent> out;
    for (const auto& item : events) {
        const auto e = item.cast<py::dict>();
        const auto kind = e["kind"].cast<std::string>();
        if (kind == "new") {
            out.emplace_back(NewCluster{ ClusterLabel{ e["label"].cast<int>() } });
        } else if (kind == "merge") {
            out.emplace_back(Merge{ to_labels(e["sources"].cast<std::vector<int>>()),
                                    ClusterLabel{ e["survivor"].cast<int>() } });
        } else {
            throw py::value_error("event kind must be 'new' or 'merge'");
        }
    }
    return out;
}

py::list from_events(const std::vector<ClusterEvent>& events)
{
    py::list out;
    for (const auto& e : events) {
        py::dict d;
        if (const auto* n = std::get_if<NewCluster>(&e)) {
            d["kind"] = "new";
            d["label"] = n->label.value();
        } else {
            const auto& m = std::get<Merge>(e);
            d["kind"] = "merge";
            d["sources"] = to_ints(m.sources);
            d["survivor"] = m.survivor.value();
        }
        out.append(d);
    }
    return out;
}

std::vector<GeoPoint> to_points(const std::vector<std::pair<double, double>>& coords)
{
    std::vector<GeoPoint> out;
    for (const auto& [lat, lon] : coords) {
        out.push_back(GeoPoint::checked(lat, lon));
    }
    return out;
}

py::list trips_list(const Corpus& corpus)
{
    py::list out;
    for (const auto& [user, trips] : corpus) {
        for (const auto& t : trips) {
            py::dict d;
            d["user_id"] = t.user_id;
            d["t_start"] = t.t_start;
            d["t_end"] = t.t_end;
            d["source"] = py::make_tuple(t.source.lat, t.source.lon);
            d["dest"] = py::make_tuple(t.dest.lat, t.dest.lon);
            d["distance_m"] = t.distance_m;
            d["duration_s"] = t.duration_s;
            out.append(d);
        }
    }
    return out;
}

KeyValues to_key_values(const std::map<std::string, std::string>& settings)
{
    KeyValues kv;
    for (const auto& [k, v] : settings) {
        kv.set(k, v);
    }
    return kv;
}

} // namespace

PYBIND11_MODULE(_tripcast, m)
{
    m.doc() = "Core bindings for tripcast.";

    py::class_<GeoPoint>(m, "GeoPoint")
        .def(py::init([](double lat, double lon) { return GeoPoint::checked(lat, lon); }), py::arg("lat"),
             py::arg("lon"))
        .def_readonly("lat", &GeoPoint::lat)
        .def_readonly("lon", &GeoPoint::lon)
        .def("__repr__", [](const GeoPoint& p) {
            return "GeoPoint(" + std::to_string(p.lat) + ", " + std::to_string(p.lon) + ")";
        });

    m.def(
        "haversine_distance",
        [](std::pair<double, double> a, std::pair<double, double> b) {
            return haversine_distance(GeoPoint::checked(a.first, a.second), GeoPoint::checked(b.first, b.second));
        },
        py::arg("a"), py::arg("b"), "Great-circle distance in meters between two (lat, lon) pairs.");

    m.def(
        "offline_dbscan",
        [](const std::vector<std::pair<double, double>>& points, double epsilon_m, int min_pts) {
            ClusterParams params;
            params.epsilon_m = epsilon_m;
            params.min_pts = min_pts;
            params.validate();
            return to_ints(offline_dbscan(to_points(points), params));
        },
        py::arg("points"), py::arg("epsilon_m") = 100.0, py::arg("min_pts") = 2);

    m.def(
        "assign_source_label",
        [](const std::map<int, double>& distances, double delta, double d_max_m) {
            ClusterParams params;
            params.delta = delta;
            params.d_max_m = d_max_m;
            params.validate();
            ClusterDistances d;
            for (const auto& [label, v] : distances) {
                d[ClusterLabel{ label }] = v;
            }
            return assign_source_label(d, params).value();
        },
        py::arg("distances"), py::arg("delta") = 2.0, py::arg("d_max_m") = 500.0);

    py::class_<OnlineClusterer>(m, "OnlineClusterer")
        .def(py::init([](const std::string& variant, double epsilon_m, int min_pts, double radii_fraction,
                         double expire_s) {
                 ClusterParams params;
                 params.epsilon_m = epsilon_m;
                 params.min_pts = min_pts;
                 params.radii_fraction = radii_fraction;
                 params.expire_s = expire_s;
                 return make_online_clusterer(parse_cluster_variant(variant), params);
             }),
             py::arg("variant") = "v1", py::arg("epsilon_m") = 100.0, py::arg("min_pts") = 2,
             py::arg("radii_fraction") = 0.5, py::arg("expire_s") = 28.0 * 86400.0)
        .def(
            "observe",
            [](OnlineClusterer& c, double lat, double lon, double t) {
                const auto obs = c.observe(GeoPoint::checked(lat, lon), t);
                return py::make_tuple(obs.label.value(), from_events(obs.events));
            },
            py::arg("lat"), py::arg("lon"), py::arg("t"))
        .def("classify", [](const OnlineClusterer& c, double lat, double lon) {
            return c.classify(GeoPoint::checked(lat, lon)).value();
        })
        .def("distances_to_clusters",
             [](const OnlineClusterer& c, double lat, double lon) {
                 std::map<int, double> out;
                 for (const auto& [label, d] : c.distances_to_clusters(GeoPoint::checked(lat, lon))) {
                     out[label.value()] = d;
                 }
                 return out;
             })
        .def_property_readonly("live_labels",
                               [](const OnlineClusterer& c) {
                                   return to_ints({ c.live_labels().begin(), c.live_labels().end() });
                               })
        .def_property_readonly("centroid_count", &OnlineClusterer::centroid_count)
        .def("snapshot", [](const OnlineClusterer& c) { return c.snapshot().dump(); });

    py::class_<BayesianModel>(m, "BayesianModel")
        .def(py::init([](double beta, double alpha) { return BayesianModel(Priors{ beta, alpha }); }),
             py::arg("beta") = 1.0, py::arg("alpha") = 1.0)
        .def_static(
            "fit_offline",
            [](const std::vector<std::pair<int, int>>& transitions, const std::vector<int>& labels, double beta,
               double alpha) {
                std::vector<Transition> ts;
                for (const auto& [s, d] : transitions) {
                    ts.push_back({ ClusterLabel{ s }, ClusterLabel{ d } });
                }
                const auto ls = to_labels(labels);
                return BayesianModel::fit_offline(ts, { ls.begin(), ls.end() }, Priors{ beta, alpha });
            },
            py::arg("transitions"), py::arg("labels"), py::arg("beta") = 1.0, py::arg("alpha") = 1.0)
        .def("predict", [](const BayesianModel& b, int source) { return prediction_dict(b.predict(ClusterLabel{ source })); })
        .def(
            "update",
            [](BayesianModel& b, int source, int dest, const py::list& events) {
                b.update({ ClusterLabel{ source }, ClusterLabel{ dest } }, to_events(events));
            },
            py::arg("source"), py::arg("dest"), py::arg("events") = py::list())
        .def("to_json", [](const BayesianModel& b) { return b.to_json().dump(); })
        .def("__eq__", [](const BayesianModel& a, const BayesianModel& b) { return a == b; });

    py::class_<ExpertModel>(m, "ExpertModel")
        .def(py::init([](double smoothing) {
                 ExpertOptions options;
                 options.smoothing = smoothing;
                 return ExpertModel(options);
             }),
             py::arg("smoothing") = 1.0)
        .def("predict", [](const ExpertModel& e, int source) { return prediction_dict(e.predict(ClusterLabel{ source })); })
        .def(
            "update",
            [](ExpertModel& e, int source, int actual, const py::list& events) {
                e.update(ClusterLabel{ source }, ClusterLabel{ actual }, to_events(events));
            },
            py::arg("source"), py::arg("actual"), py::arg("events") = py::list())
        .def("to_json", [](const ExpertModel& e) { return e.to_json().dump(); });

    m.def(
        "clustering_agreement",
        [](const std::vector<int>& pred, const std::vector<int>& truth) {
            const auto s = clustering_agreement(to_labels(pred), to_labels(truth));
            py::dict out;
            out["ami"] = s.ami;
            out["ari"] = s.ari;
            out["v_measure"] = s.v_measure;
            return out;
        },
        py::arg("pred"), py::arg("truth"));

    m.def(
        "build_state_map",
        [](const std::vector<int>& offline, const std::vector<int>& online) {
            std::map<int, std::optional<int>> out;
            for (const auto& [x, target] : build_state_map(to_labels(offline), to_labels(online)).entries()) {
                out[x.value()] = target ? std::optional<int>(target->value()) : std::nullopt;
            }
            return out;
        },
        py::arg("offline"), py::arg("online"));

    m.def(
        "hellinger_split",
        [](const std::map<int, double>& p_star, const std::map<int, double>& p_i,
           const std::map<int, std::optional<int>>& f) {
            std::map<ClusterLabel, std::optional<ClusterLabel>> entries;
            for (const auto& [x, target] : f) {
                entries[ClusterLabel{ x }] = target ? std::optional<ClusterLabel>(ClusterLabel{ *target }) : std::nullopt;
            }
            const auto s = hellinger_split(to_distribution(p_star), to_distribution(p_i), StateMap{ entries });
            py::dict out;
            out["h2"] = s.h2;
            out["h2_d"] = s.h2_d;
            out["h2_s"] = s.h2_s;
            out["orphan_mass"] = s.orphan_mass;
            return out;
        },
        py::arg("p_star"), py::arg("p_i"), py::arg("state_map"));

    m.def(
        "generate_synthetic",
        [](const std::map<std::string, std::string>& spec) {
            const auto s = SynthSpec::from_key_values(to_key_values(spec));
            return trips_list(generate_synthetic(s, s.seed).trips);
        },
        py::arg("spec") = std::map<std::string, std::string>{},
        "Synthetic trips as a list of dicts; spec values are strings as in a spec file.");

    m.def(
        "read_trips", [](const std::filesystem::path& path) { return trips_list(read_trips(path).rows); },
        py::arg("path"));

    m.def(
        "run_corpus",
        [](const std::filesystem::path& trips_path, const std::map<std::string, std::string>& settings,
           const std::optional<std::filesystem::path>& out_dir) {
            const auto config = RunConfig::from_key_values(to_key_values(settings));
            const auto corpus = read_trips(trips_path).rows;
            std::vector<UserResult> results;
            {
                py::gil_scoped_release release;
                results = run_corpus(corpus, config);
            }
            if (out_dir) {
                write_reports(*out_dir, results, config);
            }
            const auto s = summarize(results);
            py::dict acc;
            for (const auto& [kind, v] : s.mean_acc_all) {
                acc[py::str(to_string(kind))] = v;
            }
            py::dict out;
            out["users"] = s.users;
            out["mean_acc_all"] = acc;
            out["mean_final_ami"] = s.mean_final_agreement.ami;
            out["mean_final_ari"] = s.mean_final_agreement.ari;
            out["mean_final_v_measure"] = s.mean_final_agreement.v_measure;
            return out;
        },
        py::arg("trips_path"), py::arg("settings") = std::map<std::string, std::string>{},
        py::arg("out_dir") = py::none(), "Runs the pipeline on a trip CSV and returns summary metrics.");

    py::register_exception<CsvError>(m, "CsvError", PyExc_ValueError);
}
