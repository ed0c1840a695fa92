#include "tripcast/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace tripcast {

namespace {

struct Contingency
{
    std::vector<std::vector<long>> table; // rows: first labeling, columns: second
    std::vector<long> rows;
    std::vector<long> cols;
    long n{ 0 };
};

Contingency contingency(std::span<const ClusterLabel> a, std::span<const ClusterLabel> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("labelings differ in length: " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    }
    std::map<ClusterLabel, std::size_t> ia;
    std::map<ClusterLabel, std::size_t> ib;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ia.try_emplace(a[i], 0);
        ib.try_emplace(b[i], 0);
    }
    std::size_t k = 0;
    for (auto& [label, idx] : ia) {
        idx = k++;
    }
    k = 0;
    for (auto& [label, idx] : ib) {
        idx = k++;
    }
    Contingency c;
    c.table.assign(ia.size(), std::vector<long>(ib.size(), 0));
    c.rows.assign(ia.size(), 0);
    c.cols.assign(ib.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto r = ia[a[i]];
        const auto s = ib[b[i]];
        ++c.table[r][s];
        ++c.rows[r];
        ++c.cols[s];
    }
    c.n = static_cast<long>(a.size());
    return c;
}

// Equal up to a bijective relabeling.
bool same_partition(const Contingency& c)
{
    if (c.rows.size() != c.cols.size()) {
        return false;
    }
    for (const auto& row : c.table) {
        if (std::count_if(row.begin(), row.end(), [](long v) { return v > 0; }) != 1) {
            return false;
        }
    }
    return true;
}

double entropy(const std::vector<long>& counts, long n)
{
    if (n == 0) {
        return 0.0;
    }
    double h = 0.0;
    for (long v : counts) {
        if (v > 0) {
            const double p = static_cast<double>(v) / static_cast<double>(n);
            h -= p * std::log(p);
        }
    }
    return h;
}

double mutual_information(const Contingency& c)
{
    const double n = static_cast<double>(c.n);
    double mi = 0.0;
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
        for (std::size_t s = 0; s < c.cols.size(); ++s) {
            const long v = c.table[r][s];
            if (v > 0) {
                const double nij = static_cast<double>(v);
                mi += nij / n * std::log(n * nij / (static_cast<double>(c.rows[r]) * static_cast<double>(c.cols[s])));
            }
        }
    }
    return std::max(mi, 0.0);
}

// Expected mutual information under the hypergeometric model.
double expected_mutual_information(const Contingency& c)
{
    const long n = c.n;
    const double dn = static_cast<double>(n);
    std::vector<double> log_fact(static_cast<std::size_t>(n) + 1, 0.0);
    for (long k = 1; k <= n; ++k) {
        log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));
    }
    double emi = 0.0;
    for (long a : c.rows) {
        for (long b : c.cols) {
            const long lo = std::max(1L, a + b - n);
            const long hi = std::min(a, b);
            const double fixed = log_fact[a] + log_fact[b] + log_fact[n - a] + log_fact[n - b] - log_fact[n];
            for (long nij = lo; nij <= hi; ++nij) {
                const double x = static_cast<double>(nij);
                const double term = x / dn * std::log(dn * x / (static_cast<double>(a) * static_cast<double>(b)));
                const double log_p =
                    fixed - log_fact[nij] - log_fact[a - nij] - log_fact[b - nij] - log_fact[n - a - b + nij];
                emi += term * std::exp(log_p);
            }
        }
    }
    return emi;
}

double ari_of(const Contingency& c)
{
    // Pair counts; doubles avoid overflow on long histories.
    auto pairs = [](long v) { return static_cast<double>(v) * static_cast<double>(v - 1) / 2.0; };
    double sum_ij = 0.0;
    for (const auto& row : c.table) {
        for (long v : row) {
            sum_ij += pairs(v);
        }
    }
    double sum_a = 0.0;
    for (long v : c.rows) {
        sum_a += pairs(v);
    }
    double sum_b = 0.0;
    for (long v : c.cols) {
        sum_b += pairs(v);
    }
    const double total = pairs(c.n);
    if (total == 0.0) {
        return 1.0;
    }
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) {
        return 1.0;
    }
    return (sum_ij - expected) / (max_index - expected);
}

double ami_of(const Contingency& c)
{
    if (c.rows.size() == c.cols.size() && (c.rows.size() <= 1 || same_partition(c))) {
        return 1.0;
    }
    const double mi = mutual_information(c);
    const double emi = expected_mutual_information(c);
    const double normalizer = 0.5 * (entropy(c.rows, c.n) + entropy(c.cols, c.n));
    double denominator = normalizer - emi;
    const double eps = std::numeric_limits<double>::epsilon();
    denominator = denominator < 0.0 ? std::min(denominator, -eps) : std::max(denominator, eps);
    return (mi - emi) / denominator;
}

} // namespace

double adjusted_rand_index(std::span<const ClusterLabel> a, std::span<const ClusterLabel> b)
{
    const auto c = contingency(a, b);
    if (same_partition(c)) {
        return 1.0;
    }
    return ari_of(c);
}

double adjusted_mutual_information(std::span<const ClusterLabel> a, std::span<const ClusterLabel> b)
{
    return ami_of(contingency(a, b));
}

double v_measure(std::span<const ClusterLabel> pred, std::span<const ClusterLabel> truth)
{
    const auto c = contingency(truth, pred);
    if (c.n == 0 || same_partition(c)) {
        return 1.0;
    }
    const double mi = mutual_information(c);
    const double h_truth = entropy(c.rows, c.n);
    const double h_pred = entropy(c.cols, c.n);
    const double homogeneity = h_truth == 0.0 ? 1.0 : mi / h_truth;
    const double completeness = h_pred == 0.0 ? 1.0 : mi / h_pred;
    if (homogeneity + completeness == 0.0) {
        return 0.0;
    }
    return 2.0 * homogeneity * completeness / (homogeneity + completeness);
}

AgreementScores clustering_agreement(std::span<const ClusterLabel> pred, std::span<const ClusterLabel> truth)
{
    const auto c = contingency(truth, pred);
    if (same_partition(c)) {
        return { 1.0, 1.0, 1.0 };
    }
    return { ami_of(c), ari_of(c), v_measure(pred, truth) };
}

} // namespace tripcast
