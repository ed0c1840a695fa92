"""Online trip destination clustering, prediction and evaluation."""

from ._tripcast import (
    BayesianModel,
    ExpertModel,
    GeoPoint,
    OnlineClusterer,
    assign_source_label,
    build_state_map,
    clustering_agreement,
    generate_synthetic,
    haversine_distance,
    hellinger_split,
    offline_dbscan,
    read_trips,
    run_corpus,
)

__all__ = [
    "BayesianModel",
    "ExpertModel",
    "GeoPoint",
    "OnlineClusterer",
    "assign_source_label",
    "build_state_map",
    "clustering_agreement",
    "generate_synthetic",
    "haversine_distance",
    "hellinger_split",
    "offline_dbscan",
    "read_trips",
    "run_corpus",
]
