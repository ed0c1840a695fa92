#include "tripcast/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tripcast {

void ClusterParams::validate() const
{
    if (!(epsilon_m > 0.0) || min_pts < 2 || !(radii_fraction > 0.0) || radii_fraction > 1.0 || !(delta > 1.0) ||
        !(expire_s > 0.0) || !(d_max_m > 0.0)) {
        throw std::invalid_argument("cluster parameters out of range: need epsilon>0, min_pts>=2, 0<r<=1, "
                                    "delta>1, expire>0, d_max>0");
    }
}

ClusterLabel assign_source_label(const ClusterDistances& distances, const ClusterParams& params)
{
    if (distances.empty()) {
        return ClusterLabel::outlier();
    }
    std::vector<std::pair<double, ClusterLabel>> sorted;
    sorted.reserve(distances.size());
    for (const auto& [label, d] : distances) {
        sorted.emplace_back(d, label);
    }
    std::ranges::sort(sorted);

    const auto [d1, nearest] = sorted.front();
    if (d1 > params.d_max_m) {
        return ClusterLabel::outlier();
    }
    if (sorted.size() == 1) {
        return nearest;
    }
    const double d2 = sorted[1].first;
    if (d1 == 0.0) {
        return d2 > 0.0 ? nearest : ClusterLabel::outlier();
    }
    return d2 / d1 > params.delta ? nearest : ClusterLabel::outlier();
}

} // namespace tripcast
