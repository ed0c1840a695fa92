#pragma once

#include "tripcast/labels.hpp"

#include <optional>

namespace tripcast {

struct Transition
{
    ClusterLabel source;
    ClusterLabel dest;
};

// Distribution over the live labels (Outlier included) and the chosen
// non-Outlier destination. An empty choice means the model abstains.
struct Prediction
{
    Distribution distribution;
    std::optional<ClusterLabel> choice;
};

} // namespace tripcast
