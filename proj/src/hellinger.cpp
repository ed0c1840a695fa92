#include "tripcast/hellinger.hpp"

#include <cassert>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace tripcast {

StateMap::StateMap(std::map<ClusterLabel, std::optional<ClusterLabel>> f)
    : f_{ std::move(f) }
{
    for (const auto& [x, target] : f_) {
        if (target) {
            ++image_count_[*target];
        }
    }
}

StateMap StateMap::identity(std::span<const ClusterLabel> labels)
{
    std::map<ClusterLabel, std::optional<ClusterLabel>> f;
    for (const auto& l : labels) {
        f[l] = l;
    }
    return StateMap{ std::move(f) };
}

std::optional<ClusterLabel> StateMap::target(ClusterLabel offline) const
{
    const auto it = f_.find(offline);
    return it == f_.end() ? std::nullopt : it->second;
}

int StateMap::multiplicity(ClusterLabel offline) const
{
    const auto t = target(offline);
    return t ? image_count_.at(*t) : 0;
}

StateMap build_state_map(std::span<const ClusterLabel> offline_labels, std::span<const ClusterLabel> online_labels)
{
    if (offline_labels.size() != online_labels.size()) {
        throw std::invalid_argument("state map: labelings differ in length");
    }
    std::map<ClusterLabel, std::map<ClusterLabel, std::size_t>> votes;
    for (std::size_t i = 0; i < offline_labels.size(); ++i) {
        ++votes[offline_labels[i]][online_labels[i]];
    }
    std::map<ClusterLabel, std::optional<ClusterLabel>> f;
    for (const auto& [x, tally] : votes) {
        if (x.is_outlier()) {
            f[x] = ClusterLabel::outlier();
            continue;
        }
        // Ascending iteration with a strict comparison keeps the smaller label on ties.
        ClusterLabel best;
        std::size_t best_count = 0;
        for (const auto& [online, count] : tally) {
            if (count > best_count) {
                best = online;
                best_count = count;
            }
        }
        f[x] = best.is_outlier() ? std::nullopt : std::optional<ClusterLabel>{ best };
    }
    f.try_emplace(ClusterLabel::outlier(), ClusterLabel::outlier());
    return StateMap{ std::move(f) };
}

namespace {

void check_normalized(const Distribution& p, const char* name)
{
    double sum = 0.0;
    for (const auto& [label, v] : p) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument(std::string(name) + " has a negative or NaN entry");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(name) + " sums to " + std::to_string(sum));
    }
}

double mass(const Distribution& p, ClusterLabel label)
{
    const auto it = p.find(label);
    return it == p.end() ? 0.0 : it->second;
}

} // namespace

HellingerSplit hellinger_split(const Distribution& p_star, const Distribution& p_i, const StateMap& map)
{
    check_normalized(p_star, "p_star");
    check_normalized(p_i, "p_i");

    // X is the domain of f plus any labels p_star carries outside it.
    std::set<ClusterLabel> states;
    for (const auto& [x, p] : p_star) {
        states.insert(x);
    }
    for (const auto& [x, target] : map.entries()) {
        states.insert(x);
    }

    HellingerSplit out;
    std::map<ClusterLabel, double> image_mass;
    for (const auto& x : states) {
        const double p = mass(p_star, x);
        const auto target = map.target(x);
        if (!target) {
            out.h2 += 0.5 * p;
            continue;
        }
        const double q = mass(p_i, *target) / map.multiplicity(x);
        const double d = std::sqrt(p) - std::sqrt(q);
        out.h2 += 0.5 * d * d;
        image_mass[*target] += p;
    }
    for (const auto& [target, p] : image_mass) {
        const double d = std::sqrt(p) - std::sqrt(mass(p_i, target));
        out.h2_d += 0.5 * d * d;
    }
    for (const auto& [label, q] : p_i) {
        if (!image_mass.contains(label)) {
            out.orphan_mass += q;
        }
    }
    const double s = out.h2 - out.h2_d;
    assert(s >= -1e-12);
    out.h2_s = s < 0.0 ? 0.0 : s;
    out.h2_d = out.h2 - out.h2_s;
    return out;
}

RegretRecord accumulate(const std::vector<RegretRecord>& curve, std::size_t step, const HellingerSplit& split)
{
    RegretRecord r;
    r.step = step;
    r.h2 = split.h2;
    r.h2_d = split.h2_d;
    r.h2_s = split.h2_s;
    r.orphan_mass = split.orphan_mass;
    if (!curve.empty()) {
        r.cum_regret = curve.back().cum_regret;
        r.cum_h2_d = curve.back().cum_h2_d;
        r.cum_h2_s = curve.back().cum_h2_s;
    }
    r.cum_regret += r.h2;
    r.cum_h2_d += r.h2_d;
    r.cum_h2_s += r.h2_s;
    return r;
}

std::vector<RegretRecord> regret_curve(std::span<const RegretStep> steps)
{
    std::vector<RegretRecord> curve;
    curve.reserve(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        curve.push_back(accumulate(curve, i, hellinger_split(steps[i].p_star, steps[i].p_i, steps[i].map)));
    }
    return curve;
}

} // namespace tripcast
