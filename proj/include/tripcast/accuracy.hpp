#pragma once

#include "tripcast/prediction.hpp"

#include <optional>
#include <span>

namespace tripcast {

struct AccuracyScores
{
    std::optional<double> acc_all;       // absent for no trips
    std::optional<double> acc_clustered; // absent when every actual is Outlier
    std::size_t total{ 0 };
    std::size_t clustered{ 0 };
    std::size_t correct{ 0 };
};

// A trip is correct when the choice equals a non-Outlier actual; abstentions
// and Outlier actuals never count as correct. Throws on a length mismatch.
AccuracyScores accuracy(std::span<const std::optional<ClusterLabel>> choices, std::span<const ClusterLabel> actuals);

} // namespace tripcast
