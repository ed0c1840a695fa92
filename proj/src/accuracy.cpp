#include "tripcast/accuracy.hpp"

#include <stdexcept>
#include <string>

namespace tripcast {

AccuracyScores accuracy(std::span<const std::optional<ClusterLabel>> choices, std::span<const ClusterLabel> actuals)
{
    if (choices.size() != actuals.size()) {
        throw std::invalid_argument("accuracy: " + std::to_string(choices.size()) + " choices for " +
                                    std::to_string(actuals.size()) + " actuals");
    }
    AccuracyScores s;
    s.total = actuals.size();
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (actuals[i].is_outlier()) {
            continue;
        }
        ++s.clustered;
        if (choices[i] && *choices[i] == actuals[i]) {
            ++s.correct;
        }
    }
    if (s.total > 0) {
        s.acc_all = static_cast<double>(s.correct) / static_cast<double>(s.total);
    }
    if (s.clustered > 0) {
        s.acc_clustered = static_cast<double>(s.correct) / static_cast<double>(s.clustered);
    }
    return s;
}

} // namespace tripcast
