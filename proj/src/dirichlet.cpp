#include "tripcast/dirichlet.hpp"

#include <stdexcept>

namespace tripcast {

void DirichletCategorical::add_label(ClusterLabel label, double prior, double count)
{
    if (prior < 0.0 || count < 0.0) {
        throw std::invalid_argument("pseudocount must be non-negative");
    }
    cells_.emplace(label, Cell{ prior, count });
}

void DirichletCategorical::observe(ClusterLabel label, double weight)
{
    auto it = cells_.find(label);
    if (it == cells_.end()) {
        throw std::out_of_range("unknown label " + label.to_string());
    }
    it->second.count += weight;
}

void DirichletCategorical::merge(std::span<const ClusterLabel> sources, ClusterLabel survivor)
{
    Cell sum;
    for (const auto& s : sources) {
        auto it = cells_.find(s);
        if (it == cells_.end()) {
            throw std::out_of_range("merge of unknown label " + s.to_string());
        }
        sum.prior += it->second.prior;
        sum.count += it->second.count;
    }
    for (const auto& s : sources) {
        cells_.erase(s);
    }
    cells_[survivor] = sum;
}

void DirichletCategorical::absorb(const DirichletCategorical& other)
{
    for (const auto& [label, cell] : other.cells_) {
        auto& mine = cells_[label];
        mine.prior += cell.prior;
        mine.count += cell.count;
    }
}

double DirichletCategorical::pseudocount(ClusterLabel label) const
{
    auto it = cells_.find(label);
    return it == cells_.end() ? 0.0 : it->second.mass();
}

std::map<ClusterLabel, double> DirichletCategorical::pseudocounts() const
{
    std::map<ClusterLabel, double> out;
    for (const auto& [label, cell] : cells_) {
        out.emplace(label, cell.mass());
    }
    return out;
}

double DirichletCategorical::total() const
{
    double sum = 0.0;
    for (const auto& [label, cell] : cells_) {
        sum += cell.mass();
    }
    return sum;
}

Distribution DirichletCategorical::probabilities() const
{
    Distribution out;
    const double sum = total();
    for (const auto& [label, cell] : cells_) {
        out[label] = sum > 0.0 ? cell.mass() / sum : 1.0 / static_cast<double>(cells_.size());
    }
    return out;
}

std::optional<ClusterLabel> DirichletCategorical::argmax_cluster() const
{
    if (!(total() > 0.0)) {
        return std::nullopt;
    }
    std::optional<ClusterLabel> best;
    double best_mass = -1.0;
    for (const auto& [label, cell] : cells_) {
        if (!label.is_outlier() && cell.mass() > best_mass) {
            best = label;
            best_mass = cell.mass();
        }
    }
    return best;
}

void DirichletCategorical::scale(double factor)
{
    if (!(factor > 0.0)) {
        throw std::invalid_argument("scale factor must be positive");
    }
    for (auto& [label, cell] : cells_) {
        cell.prior *= factor;
        cell.count *= factor;
    }
}

} // namespace tripcast
