#include "tripcast/bayes.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace tripcast;

namespace {

ClusterLabel L(int v)
{
    return ClusterLabel{ v };
}

const ClusterLabel kOut = ClusterLabel::outlier();

std::set<ClusterLabel> labels(std::initializer_list<int> v)
{
    std::set<ClusterLabel> out;
    for (int x : v) {
        out.insert(L(x));
    }
    return out;
}

} // namespace

TEST(Dirichlet, MergeConservesMass)
{
    DirichletCategorical dc;
    dc.add_label(kOut, 1.0);
    dc.add_label(L(0), 4.0);
    dc.add_label(L(1), 2.0);
    const std::vector<ClusterLabel> sources{ L(0), L(1) };
    dc.merge(sources, L(0));
    EXPECT_EQ(dc.pseudocounts(), (std::map<ClusterLabel, double>{ { kOut, 1.0 }, { L(0), 6.0 } }));
    EXPECT_EQ(dc.total(), 7.0);
}

TEST(Dirichlet, ArgmaxExcludesOutlierAndBreaksTiesLow)
{
    DirichletCategorical dc;
    dc.add_label(kOut, 5.0);
    dc.add_label(L(0), 3.0);
    dc.add_label(L(1), 2.0);
    EXPECT_EQ(dc.argmax_cluster(), L(0));

    DirichletCategorical tie;
    tie.add_label(L(5), 4.0);
    tie.add_label(L(2), 4.0);
    tie.add_label(kOut, 2.0);
    EXPECT_EQ(tie.argmax_cluster(), L(2));
}

TEST(Dirichlet, ArgmaxScaleInvariant)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        DirichletCategorical dc;
        for (int k = -1; k < 6; ++k) {
            dc.add_label(L(k), u(rng));
        }
        auto scaled = dc;
        scaled.scale(u(rng) + 0.01);
        EXPECT_EQ(dc.argmax_cluster(), scaled.argmax_cluster());
    }
}

TEST(Dirichlet, UnknownLabelThrows)
{
    DirichletCategorical dc;
    dc.add_label(kOut, 1.0);
    EXPECT_THROW(dc.observe(L(3)), std::out_of_range);
}

TEST(Bayes, OfflineConditionalPosteriorMean)
{
    const std::vector<Transition> ts{ { L(0), L(1) }, { L(0), L(1) }, { L(1), L(0) } };
    const auto model = BayesianModel::fit_offline(ts, labels({ -1, 0, 1 }));
    const auto p = model.predict(L(0)).distribution;
    EXPECT_DOUBLE_EQ(p.at(kOut), 1.0 / 5.0);
    EXPECT_DOUBLE_EQ(p.at(L(0)), 1.0 / 5.0);
    EXPECT_DOUBLE_EQ(p.at(L(1)), 3.0 / 5.0);
}

TEST(Bayes, NoDataIsUniformPrior)
{
    const auto model = BayesianModel::fit_offline({}, labels({ -1, 0, 1 }));
    for (const auto& [label, p] : model.predict(L(0)).distribution) {
        EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
    }
}

TEST(Bayes, ZeroPriorsGiveEmpiricalFrequencies)
{
    const std::vector<Transition> ts{ { L(0), L(1) }, { L(0), L(1) }, { L(0), kOut }, { L(1), L(0) } };
    const auto model = BayesianModel::fit_offline(ts, labels({ -1, 0, 1 }), Priors{ 0.0, 0.0 });
    const auto p = model.predict(L(0)).distribution;
    EXPECT_DOUBLE_EQ(p.at(L(1)), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(p.at(kOut), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(p.at(L(0)), 0.0);
}

TEST(Bayes, ChoiceExcludesOutlier)
{
    // Conditional mass (-1: 5, 0: 3, 1: 2) with zero priors.
    std::vector<Transition> ts;
    for (int i = 0; i < 5; ++i) {
        ts.push_back({ L(0), kOut });
    }
    for (int i = 0; i < 3; ++i) {
        ts.push_back({ L(0), L(0) });
    }
    for (int i = 0; i < 2; ++i) {
        ts.push_back({ L(0), L(1) });
    }
    const auto model = BayesianModel::fit_offline(ts, labels({ -1, 0, 1 }), Priors{ 0.0, 0.0 });
    EXPECT_EQ(model.predict(L(0)).choice, L(0));
}

TEST(Bayes, OutlierAndUnknownSourceUseGlobal)
{
    const std::vector<Transition> ts{ { L(0), L(1) }, { L(1), L(2) }, { L(2), L(2) }, { kOut, L(2) } };
    const auto model = BayesianModel::fit_offline(ts, labels({ 0, 1, 2 }));
    const auto global = model.predict_global();
    EXPECT_EQ(model.predict(kOut).distribution, global.distribution);
    EXPECT_EQ(model.predict(L(9)).distribution, global.distribution);
    EXPECT_EQ(global.choice, L(2));
}

TEST(Bayes, AbstainsWithoutClusters)
{
    BayesianModel model;
    EXPECT_FALSE(model.predict(kOut).choice.has_value());
    EXPECT_DOUBLE_EQ(model.predict(kOut).distribution.at(kOut), 1.0);
}

TEST(Bayes, NewClusterExtendsEverywhere)
{
    BayesianModel model;
    const std::vector<ClusterEvent> create{ NewCluster{ L(0) } };
    model.update({ kOut, L(0) }, create);
    const std::vector<ClusterEvent> add{ NewCluster{ L(3) } };
    model.apply_events(add);
    EXPECT_EQ(model.global().pseudocount(L(3)), 1.0);
    EXPECT_EQ(model.global().pseudocount(L(0)), 2.0);
    for (const auto& [source, dc] : model.conditionals()) {
        EXPECT_TRUE(dc.contains(L(3)));
    }
    EXPECT_TRUE(model.conditionals().contains(L(3)));
}

TEST(Bayes, MergeRemapsAndCombinesConditionals)
{
    BayesianModel model;
    const std::vector<ClusterEvent> create{ NewCluster{ L(0) }, NewCluster{ L(1) } };
    model.apply_events(create);
    model.update({ L(0), L(1) });
    model.update({ L(1), L(0) });
    model.update({ L(1), L(1) });
    const auto mass_before = model.global().total();
    const std::vector<ClusterEvent> merge{ Merge{ { L(0), L(1) }, L(0) } };
    // Source given in the pre-merge space.
    model.update({ L(1), L(0) }, merge);
    EXPECT_EQ(model.labels(), labels({ -1, 0 }));
    EXPECT_EQ(model.global().total(), mass_before + 1.0);
    EXPECT_FALSE(model.conditionals().contains(L(1)));
    // Conditionals 0 and 1 (3 labels each, alpha = 1) merged, plus 4 counts.
    EXPECT_EQ(model.conditionals().at(L(0)).total(), 3.0 + 3.0 + 4.0);
}

TEST(Bayes, InvalidEventRejectedWithoutChange)
{
    BayesianModel model;
    const std::vector<ClusterEvent> create{ NewCluster{ L(0) } };
    model.apply_events(create);
    const auto before = model;
    const std::vector<ClusterEvent> bad{ Merge{ { L(0), L(7) }, L(0) } };
    EXPECT_THROW(model.update({ L(0), L(0) }, bad), std::invalid_argument);
    const std::vector<ClusterEvent> dup{ NewCluster{ L(0) } };
    EXPECT_THROW(model.update({ L(0), L(0) }, dup), std::invalid_argument);
    EXPECT_EQ(model, before);
}

TEST(Bayes, SequentialEqualsBatchForAnyOrder)
{
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> lab(-1, 4);
    std::vector<Transition> ts;
    for (int i = 0; i < 300; ++i) {
        ts.push_back({ L(lab(rng)), L(lab(rng)) });
    }
    const auto all = labels({ -1, 0, 1, 2, 3, 4 });
    const auto batch = BayesianModel::fit_offline(ts, all);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(ts.begin(), ts.end(), rng);
        BayesianModel seq;
        std::vector<ClusterEvent> create;
        for (int k = 0; k <= 4; ++k) {
            create.push_back(NewCluster{ L(k) });
        }
        seq.apply_events(create);
        for (const auto& t : ts) {
            seq.update(t);
        }
        EXPECT_EQ(seq, batch);
    }
}

TEST(Bayes, DistributionsSumToOne)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> lab(-1, 6);
    std::vector<Transition> ts;
    for (int i = 0; i < 100; ++i) {
        ts.push_back({ L(lab(rng)), L(lab(rng)) });
    }
    const auto model = BayesianModel::fit_offline(ts, {}, Priors{ 0.3, 0.7 });
    for (int s = -1; s <= 7; ++s) {
        double sum = 0.0;
        for (const auto& [l, p] : model.predict(L(s)).distribution) {
            sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(Bayes, FractionalPriorsStayOrderInvariant)
{
    std::vector<Transition> ts;
    for (int i = 0; i < 50; ++i) {
        ts.push_back({ L(i % 2), L((i / 2) % 2) });
    }
    const Priors priors{ 0.1, 0.3 };
    BayesianModel seq(priors);
    const std::vector<ClusterEvent> create{ NewCluster{ L(0) }, NewCluster{ L(1) } };
    seq.apply_events(create);
    for (const auto& t : ts) {
        seq.update(t);
    }
    EXPECT_EQ(seq, BayesianModel::fit_offline(ts, labels({ 0, 1 }), priors));
}
