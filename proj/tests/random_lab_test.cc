/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#include "oracles.hh"
#include "support.hh"

#include <canvdw/random_lab.hh>

#include <gtest/gtest.h>

#include <cmath>

using namespace canvdw;

namespace
{
    auto plan_for(Integer n, Rational p, std::size_t trials, std::uint64_t seed, Property prop) -> TrialPlan
    {
        TrialPlan plan;
        plan.n = n;
        plan.p = p;
        plan.trials = trials;
        plan.seed = seed;
        plan.property = prop;
        return plan;
    }

    /// p with P(Bin(n, p) >= m) = 1/2, by bisection on the exact tail.
    auto binomial_median_p(long n, long m) -> double
    {
        double lo = 0.0, hi = 1.0;
        for (int i = 0 ; i < 60 ; ++i) {
            double mid = (lo + hi) / 2;
            (oracle::binomial_upper_tail(n, mid, m) < 0.5 ? lo : hi) = mid;
        }
        return (lo + hi) / 2;
    }
}

TEST(SampleBinomialSet, Endpoints)
{
    for (std::uint64_t t = 0 ; t < 20 ; ++t) {
        EXPECT_TRUE(sample_binomial_set(50, Rational{0}, 3, t).empty());
        EXPECT_EQ(sample_binomial_set(50, Rational{1}, 3, t), GroundSet::interval(50));
    }
    EXPECT_THROW(sample_binomial_set(10, Rational{-1, 2}, 0, 0), InvalidParameter);
    EXPECT_THROW(sample_binomial_set(10, Rational{3, 2}, 0, 0), InvalidParameter);
}

TEST(SampleBinomialSet, DeterministicAndNested)
{
    for (std::uint64_t t = 0 ; t < 50 ; ++t) {
        auto a = sample_binomial_set(200, Rational{1, 4}, 99, t);
        EXPECT_EQ(a, sample_binomial_set(200, Rational{1, 4}, 99, t));
        EXPECT_EQ(a.ambient_bound(), 200);
        auto b = sample_binomial_set(200, Rational{1, 2}, 99, t);
        EXPECT_TRUE(a.is_subset_of(b));
        EXPECT_NE(b, sample_binomial_set(200, Rational{1, 2}, 99, t + 1000));
    }
}

TEST(SampleBinomialSet, Concentration)
{
    const Integer n = 10'000;
    const double slack = 4 * std::sqrt(double(n) / 4);
    int inside = 0;
    for (std::uint64_t t = 0 ; t < 1000 ; ++t) {
        auto size = double(sample_binomial_set(n, Rational{1, 2}, 5, t).size());
        inside += std::abs(size - double(n) / 2) <= slack;
    }
    EXPECT_GE(inside, 990);
}

TEST(SampleBinomialSet, ElementFrequencies)
{
    // each x lands with probability p; pooled over trials the count is
    // binomial, so a 5 sigma band is generous
    const int trials = 4000;
    for (auto p : {Rational{1, 3}, Rational{7, 10}}) {
        std::vector<int> hits(31, 0);
        for (int t = 0 ; t < trials ; ++t)
            for (auto x : sample_binomial_set(30, p, 17, std::uint64_t(t)))
                ++hits[std::size_t(x)];
        double q = rational_to_double(p), sigma = std::sqrt(trials * q * (1 - q));
        for (int x = 1 ; x <= 30 ; ++x)
            EXPECT_NEAR(hits[std::size_t(x)], trials * q, 5 * sigma) << x;
    }
}

TEST(InclusionThreshold, ExactDyadics)
{
    EXPECT_EQ(inclusion_threshold(Rational{0}), 0u);
    EXPECT_EQ(inclusion_threshold(Rational{1, 2}), std::uint64_t(1) << 63);
    EXPECT_EQ(inclusion_threshold(Rational{1, 4}), std::uint64_t(1) << 62);
    EXPECT_EQ(inclusion_threshold(Rational{1}), std::numeric_limits<std::uint64_t>::max());
}

TEST(EstimateProbability, Examples)
{
    auto whole = estimate_probability(plan_for(30, Rational{1}, 5, 1, property::CanVdW{3}));
    auto verdict = is_can_k_vdW(GroundSet::interval(30), 3).holds();
    EXPECT_EQ(whole.point_estimate(), Rational(verdict ? 1 : 0));

    for (Integer n : {5, 40}) {
        auto empty = estimate_probability(plan_for(n, Rational{0}, 20, 1, property::CanVdW{3}));
        EXPECT_EQ(empty.point_estimate(), Rational{0});
        EXPECT_EQ(empty.trials(), 20u);
    }
}

TEST(EstimateProbability, GirthMatchesDirectChecks)
{
    auto plan = plan_for(50, Rational{1, 8}, 300, 8, property::GirthAtLeast{3, 3});
    auto outcome = estimate_probability(plan);
    std::uint64_t direct = 0;
    for (std::uint64_t t = 0 ; t < plan.trials ; ++t)
        direct += has_girth_at_least(build_ap_hypergraph(sample_binomial_set(50, plan.p, 8, t), 3), 3);
    EXPECT_EQ(outcome.successes, direct);
    EXPECT_EQ(outcome.failures, plan.trials - direct);
    EXPECT_GT(direct, 0u);
    EXPECT_LT(direct, plan.trials);
}

TEST(EstimateProbability, DeterministicAcrossThreadCounts)
{
    auto plan = plan_for(40, Rational{3, 8}, 120, 77, property::CanVdW{3});
    plan.threads = 1;
    auto one = estimate_probability(plan);
    plan.threads = 4;
    auto four = estimate_probability(plan);
    EXPECT_EQ(one.successes, four.successes);
    EXPECT_EQ(one.failures, four.failures);
    ASSERT_EQ(one.records.size(), four.records.size());
    for (std::size_t i = 0 ; i < one.records.size() ; ++i) {
        EXPECT_EQ(one.records[i].trial, i);
        EXPECT_EQ(one.records[i].set_size, four.records[i].set_size);
        EXPECT_EQ(one.records[i].verdict, four.records[i].verdict);
        EXPECT_EQ(one.records[i].nodes_explored, four.records[i].nodes_explored);
        auto alone = run_trial(plan, i);
        EXPECT_EQ(alone.verdict, one.records[i].verdict);
    }
}

TEST(EstimateProbability, BudgetExhaustionCountedSeparately)
{
    auto plan = plan_for(40, Rational{1}, 10, 1, property::RkVdW{3, 3});
    plan.node_budget = 5;
    auto outcome = estimate_probability(plan);
    EXPECT_EQ(outcome.budget_exhausted, 10u);
    EXPECT_EQ(outcome.trials(), 10u);
    EXPECT_EQ(outcome.point_estimate(), (Rational{1, 2}));
    EXPECT_EQ(outcome.optimistic_estimate(), Rational{1});
    EXPECT_EQ(outcome.pessimistic_estimate(), Rational{0});
}

TEST(EstimateProbability, EarlyStopStopsAtBatchBoundary)
{
    auto plan = plan_for(30, Rational{1}, 500, 1, property::SizeAtLeast{1});
    plan.early_stop = EarlyStop{Rational{1, 2}, 25};
    auto outcome = estimate_probability(plan);
    EXPECT_EQ(outcome.trials(), 25u);
    EXPECT_EQ(outcome.successes, 25u);
}

TEST(EstimateProbability, MonotoneWithinNoise)
{
    for (auto p : {Rational{1, 8}, Rational{3, 16}, Rational{1, 4}}) {
        auto at_p = estimate_probability(plan_for(48, p, 150, 4, property::CanVdW{3}));
        auto at_2p = estimate_probability(plan_for(48, 2 * p, 150, 4, property::CanVdW{3}));
        double a = rational_to_double(at_p.point_estimate()), b = rational_to_double(at_2p.point_estimate());
        double sigma = std::sqrt(0.25 / 150.0);
        EXPECT_GE(b, a - 3 * sigma);
    }
}

TEST(WilsonInterval, ContainsEstimateAndCalibrates)
{
    for (std::uint64_t total : {1u, 5u, 40u, 1000u})
        for (std::uint64_t s = 0 ; s <= total ; s += std::max<std::uint64_t>(1, total / 7)) {
            auto i = wilson_interval(s, total);
            double phat = double(s) / double(total);
            EXPECT_LE(i.lo, phat);
            EXPECT_GE(i.hi, phat);
            EXPECT_GE(i.lo, 0.0);
            EXPECT_LE(i.hi, 1.0);
        }

    // known-probability property: P(|[n]_p| >= m)
    const long n = 40, m = 14;
    const Rational p{3, 8};
    double q = oracle::binomial_upper_tail(n, rational_to_double(p), m);
    int covered = 0;
    for (std::uint64_t meta = 0 ; meta < 100 ; ++meta) {
        auto outcome = estimate_probability(plan_for(n, p, 200, 1000 + meta, property::SizeAtLeast{std::size_t(m)}));
        auto i = outcome.confidence_interval();
        covered += (i.lo <= q && q <= i.hi);
    }
    EXPECT_GE(covered, 93);
}

TEST(ThresholdBisect, SizeStepContainsBinomialMedian)
{
    ThresholdQuery query;
    query.n = 100;
    query.property = property::SizeAtLeast{30};
    query.trials = 2000;
    query.seed = 3;
    auto result = threshold_bisect(query);
    double median = binomial_median_p(100, 30);
    EXPECT_LE(result.p_hi - result.p_lo, query.resolution);
    EXPECT_LE(rational_to_double(result.p_lo) - 0.01, median);
    EXPECT_GE(rational_to_double(result.p_hi) + 0.01, median);
    EXPECT_LT(result.estimate_lo, query.target);
    EXPECT_GE(result.estimate_hi, query.target);
}

TEST(ThresholdBisect, Diagnostics)
{
    ThresholdQuery constant;
    constant.n = 10;
    constant.property = property::SizeAtLeast{0};
    constant.trials = 50;
    try {
        threshold_bisect(constant);
        FAIL() << "expected a diagnostic";
    }
    catch (const ThresholdDiagnostic & d) {
        EXPECT_EQ(d.kind(), ThresholdDiagnostic::Kind::no_crossing);
    }

    ThresholdQuery decreasing;
    decreasing.n = 30;
    decreasing.property = property::GirthAtLeast{3, 3};
    decreasing.trials = 50;
    try {
        threshold_bisect(decreasing);
        FAIL() << "expected a diagnostic";
    }
    catch (const ThresholdDiagnostic & d) {
        EXPECT_EQ(d.kind(), ThresholdDiagnostic::Kind::non_monotone);
    }
}

TEST(ThresholdBisector, ProbesAreCachedAndDyadic)
{
    ThresholdQuery query;
    query.n = 24;
    query.property = property::CanVdW{3};
    query.trials = 60;
    query.seed = 9;
    query.resolution = Rational{1, 16};
    ThresholdBisector bisector{query};
    auto point = bisector.locate(EstimateKind::point);
    auto count = bisector.probes().size();
    auto again = bisector.locate(EstimateKind::point);
    EXPECT_EQ(bisector.probes().size(), count);
    EXPECT_EQ(point.p_lo, again.p_lo);
    for (auto & probe : bisector.probes())
        EXPECT_EQ(16 % probe.p.denominator(), 0);
}

TEST(ScalingExperiment, SingleRowAndNormalisation)
{
    ScalingOptions options;
    options.trials = 40;
    options.seed = 2;
    options.resolution = Rational{1, 32};
    auto one = scaling_experiment(3, {25}, options);
    ASSERT_EQ(one.rows.size(), 1u);
    EXPECT_DOUBLE_EQ(one.ratio(EstimateKind::point), 1.0);
    EXPECT_DOUBLE_EQ(one.normalized(one.rows[0], EstimateKind::point), rational_to_double(one.rows[0].point.p_star()) * 5.0);

    // k = 4 normalises by n^{1/3}
    ScalingTable k4;
    k4.k = 4;
    for (Integer n : {27, 216}) {
        ScalingRow row;
        row.n = n;
        row.point.p_lo = Rational{1, 4} * Rational{27} / Rational{n};
        row.point.p_hi = row.point.p_lo;
        k4.rows.push_back(row);
    }
    EXPECT_NEAR(k4.normalized(k4.rows[0], EstimateKind::point), 0.75, 1e-9);
    EXPECT_NEAR(k4.ratio(EstimateKind::point), 4.0, 1e-9);

    EXPECT_THROW(scaling_experiment(3, {64, 32}, options), InvalidParameter);
}

TEST(SearchSparseCanVdW, GirthTwoReducesToCanVdW)
{
    auto found = search_sparse_canvdw(3, 2, 20, Rational{1}, 3, 1);
    ASSERT_TRUE(found.witness.has_value());
    EXPECT_EQ(*found.witness, GroundSet::interval(20));
    EXPECT_EQ(found.attempts.size(), 1u);
    EXPECT_TRUE(found.attempts[0].girth_ok);
    EXPECT_TRUE(is_can_k_vdW(*found.witness, 3).holds());
}

TEST(SearchSparseCanVdW, NoneFoundLogsEveryAttempt)
{
    auto none = search_sparse_canvdw(3, 3, 8, Rational{1, 2}, 7, 4);
    EXPECT_FALSE(none.witness.has_value());
    EXPECT_EQ(none.attempts.size(), 7u);
    for (auto & a : none.attempts)
        if (! a.girth_ok) {
            EXPECT_FALSE(a.canvdw.has_value());
        }
    EXPECT_THROW(search_sparse_canvdw(3, 1, 8, Rational{1, 2}, 7, 4), InvalidParameter);
}
