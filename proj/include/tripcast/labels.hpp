#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tripcast {

// Cluster id, or the Outlier marker (stored as -1). Orders Outlier first.
class ClusterLabel
{
public:
    constexpr ClusterLabel() = default;

    // `value` must be >= -1; -1 means Outlier.
    explicit ClusterLabel(int value);

    static constexpr ClusterLabel outlier() { return ClusterLabel{}; }

    constexpr bool is_outlier() const { return value_ < 0; }
    constexpr int value() const { return value_; }

    auto operator<=>(const ClusterLabel&) const = default;

    std::string to_string() const { return std::to_string(value_); }

private:
    int value_{ -1 };
};

struct NewCluster
{
    ClusterLabel label;
    bool operator==(const NewCluster&) const = default;
};

// Sources are sorted ascending, hold at least two labels, and the survivor is
// the smallest of them. Retired labels are never reused.
struct Merge
{
    std::vector<ClusterLabel> sources;
    ClusterLabel survivor;
    bool operator==(const Merge&) const = default;
};

// Structural change of the live cluster set. "No change" is an empty event
// list; several events may come out of one observation and apply in order.
using ClusterEvent = std::variant<NewCluster, Merge>;

// Maps a label through a sequence of merges.
ClusterLabel resolve_label(ClusterLabel label, std::span<const ClusterEvent> events);

std::string describe(const ClusterEvent& event);

// Probability per label. std::map keeps iteration order deterministic.
using Distribution = std::map<ClusterLabel, double>;

} // namespace tripcast
