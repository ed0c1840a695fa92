#pragma once

#include "tripcast/labels.hpp"

#include <span>

namespace tripcast {

struct AgreementScores
{
    double ami{ 0.0 };
    double ari{ 0.0 };
    double v_measure{ 0.0 };
};

// Adjusted Rand index, adjusted mutual information (arithmetic-mean
// normalization) and V-measure. Outlier is an ordinary label value here.
// Throws std::invalid_argument on a length mismatch.
AgreementScores clustering_agreement(std::span<const ClusterLabel> pred, std::span<const ClusterLabel> truth);

double adjusted_rand_index(std::span<const ClusterLabel> a, std::span<const ClusterLabel> b);
double adjusted_mutual_information(std::span<const ClusterLabel> a, std::span<const ClusterLabel> b);
double v_measure(std::span<const ClusterLabel> pred, std::span<const ClusterLabel> truth);

} // namespace tripcast
