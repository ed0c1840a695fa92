#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace tripcast {

class SnapshotError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Parses a snapshot file; unreadable or malformed JSON throws SnapshotError.
nlohmann::json load_snapshot(const std::filesystem::path& path);

// Text summary of a per-user run snapshot or a bare clusterer snapshot: one
// row per live cluster, pending points, and model pseudocounts or tallies.
// Structurally invalid snapshots throw SnapshotError.
std::string inspect_summary(const nlohmann::json& snapshot);

} // namespace tripcast
