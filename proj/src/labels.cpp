#include "tripcast/labels.hpp"

#include <algorithm>
#include <stdexcept>

namespace tripcast {

ClusterLabel::ClusterLabel(int value)
    : value_{ value }
{
    if (value < -1) {
        throw std::invalid_argument("cluster label must be >= -1, got " + std::to_string(value));
    }
}

ClusterLabel resolve_label(ClusterLabel label, std::span<const ClusterEvent> events)
{
    for (const auto& event : events) {
        if (const auto* merge = std::get_if<Merge>(&event)) {
            if (std::ranges::find(merge->sources, label) != merge->sources.end()) {
                label = merge->survivor;
            }
        }
    }
    return label;
}

std::string describe(const ClusterEvent& event)
{
    if (const auto* created = std::get_if<NewCluster>(&event)) {
        return "new " + created->label.to_string();
    }
    const auto& merge = std::get<Merge>(event);
    std::string out = "merge";
    for (const auto& s : merge.sources) {
        out += " " + s.to_string();
    }
    return out + " -> " + merge.survivor.to_string();
}

} // namespace tripcast
