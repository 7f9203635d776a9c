/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_RANDOM_LAB_HH
#define CANVDW_GUARD_RANDOM_LAB_HH 1

#include <canvdw/ap_core.hh>
#include <canvdw/decider.hh>
#include <canvdw/errors.hh>
#include <canvdw/hypergraph_cycles.hh>
#include <canvdw/rational.hh>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace canvdw
{
    /// splitmix64 finaliser.
    inline auto mix64(std::uint64_t x) -> std::uint64_t
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Uniform 64-bit value for element x of trial t under a seed. Pure
    /// function of its arguments, so trials can run in any order.
    inline auto element_hash(std::uint64_t seed, std::uint64_t trial, Integer x) -> std::uint64_t
    {
        return mix64(mix64(mix64(seed) ^ trial) ^ std::uint64_t(x));
    }

    inline auto check_probability(const Rational & p) -> void
    {
        if (p < 0 || p > 1)
            throw InvalidParameter("probability must lie in [0, 1], got " + to_string(p));
    }

    /// floor(p 2^64); x is kept when its hash falls below this. p = 1 keeps
    /// everything and is handled separately.
    inline auto inclusion_threshold(const Rational & p) -> std::uint64_t
    {
        check_probability(p);
        if (p == Rational{1})
            return std::numeric_limits<std::uint64_t>::max();
        auto scaled = (static_cast<unsigned __int128>(p.numerator()) << 64) / static_cast<unsigned __int128>(p.denominator());
        return std::uint64_t(scaled);
    }

    /// [n]_p for one trial. The same (seed, trial) gives nested sets as p
    /// grows, which is what makes probes at different p comparable.
    inline auto sample_binomial_set(Integer n, const Rational & p, std::uint64_t seed, std::uint64_t trial) -> GroundSet
    {
        auto threshold = inclusion_threshold(p);
        bool everything = p == Rational{1};
        std::vector<Integer> elements;
        for (Integer x = 1 ; x <= n ; ++x)
            if (everything || element_hash(seed, trial, x) < threshold)
                elements.push_back(x);
        return GroundSet{std::move(elements), std::max<Integer>(n, 0)};
    }

    namespace property
    {
        struct CanVdW { unsigned k = 3; };
        struct RkVdW { unsigned r = 2; unsigned k = 3; };
        struct AlphaRb { Rational alpha{1, 2}; unsigned k = 3; };
        struct AlphaSz { Rational alpha{1, 2}; unsigned k = 3; };
        struct GirthAtLeast { std::size_t g = 3; unsigned k = 3; };

        /// |A| >= m; a synthetic property with a known binomial law.
        struct SizeAtLeast { std::size_t m = 1; };
    }

    using Property = std::variant<property::CanVdW, property::RkVdW, property::AlphaRb,
          property::AlphaSz, property::GirthAtLeast, property::SizeAtLeast>;

    inline auto to_string(const Property & prop) -> std::string
    {
        return std::visit([] (const auto & p) -> std::string {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, property::CanVdW>)
                    return "canvdw(k=" + std::to_string(p.k) + ")";
                else if constexpr (std::is_same_v<P, property::RkVdW>)
                    return "rkvdw(r=" + std::to_string(p.r) + ",k=" + std::to_string(p.k) + ")";
                else if constexpr (std::is_same_v<P, property::AlphaRb>)
                    return "alpharb(alpha=" + to_string(p.alpha) + ",k=" + std::to_string(p.k) + ")";
                else if constexpr (std::is_same_v<P, property::AlphaSz>)
                    return "alphasz(alpha=" + to_string(p.alpha) + ",k=" + std::to_string(p.k) + ")";
                else if constexpr (std::is_same_v<P, property::GirthAtLeast>)
                    return "girth(g=" + std::to_string(p.g) + ",k=" + std::to_string(p.k) + ")";
                else
                    return "size(m=" + std::to_string(p.m) + ")";
                }, prop);
    }

    struct PropertyCheck
    {
        Verdict verdict = Verdict::fails;
        std::uint64_t nodes_explored = 0;
    };

    inline auto check_property(const Property & prop, const GroundSet & set, std::uint64_t node_budget) -> PropertyCheck
    {
        DeciderOptions options;
        options.node_budget = node_budget;
        auto from = [] (const DecisionResult & r) { return PropertyCheck{r.verdict, r.nodes_explored}; };
        auto from_bool = [] (bool b) { return PropertyCheck{b ? Verdict::holds : Verdict::fails, 0}; };

        return std::visit([&] (const auto & p) -> PropertyCheck {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, property::CanVdW>)
                    return from(is_can_k_vdW(set, p.k, options));
                else if constexpr (std::is_same_v<P, property::RkVdW>)
                    return from(is_r_k_vdW(set, p.r, p.k, options));
                else if constexpr (std::is_same_v<P, property::AlphaRb>)
                    return from(is_alpha_k_rb(set, p.alpha, p.k, options));
                else if constexpr (std::is_same_v<P, property::AlphaSz>)
                    return from(is_alpha_k_Sz(set, p.alpha, p.k, options));
                else if constexpr (std::is_same_v<P, property::GirthAtLeast>)
                    return from_bool(has_girth_at_least(build_ap_hypergraph(set, p.k), p.g));
                else
                    return from_bool(set.size() >= p.m);
                }, prop);
    }

    /// Stop a probe once the Wilson interval excludes the target, checking
    /// after every `batch` trials.
    struct EarlyStop
    {
        Rational target{1, 2};
        std::size_t batch = 50;
    };

    struct TrialPlan
    {
        Integer n = 0;
        Rational p{0};
        std::size_t trials = 1;
        std::uint64_t seed = 0;
        Property property = property::CanVdW{};
        std::uint64_t node_budget = std::numeric_limits<std::uint64_t>::max();
        std::optional<EarlyStop> early_stop;
        unsigned threads = 0;  ///< 0: hardware concurrency
    };

    struct TrialRecord
    {
        std::uint64_t trial = 0;
        std::size_t set_size = 0;
        Verdict verdict = Verdict::fails;
        std::uint64_t nodes_explored = 0;
        std::chrono::nanoseconds elapsed{0};
    };

    inline constexpr double wilson_z95 = 1.959963984540054;

    struct Interval
    {
        double lo = 0.0, hi = 1.0;
    };

    /// Wilson score interval for `successes` out of `total`; [0, 1] when
    /// total is zero.
    inline auto wilson_interval(std::uint64_t successes, std::uint64_t total, double z = wilson_z95) -> Interval
    {
        if (total == 0)
            return Interval{0.0, 1.0};
        auto n = double(total), phat = double(successes) / n, z2 = z * z;
        auto denom = 1.0 + z2 / n;
        auto centre = (phat + z2 / (2.0 * n)) / denom;
        auto half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
        Interval result{std::max(0.0, centre - half), std::min(1.0, centre + half)};
        if (successes == 0)
            result.lo = 0.0;
        if (successes == total)
            result.hi = 1.0;
        result.lo = std::min(result.lo, phat);
        result.hi = std::max(result.hi, phat);
        return result;
    }

    /// Which reading of budget-exhausted trials an estimate uses.
    enum class EstimateKind
    {
        point,        ///< exhausted trials excluded
        optimistic,   ///< exhausted trials counted as successes
        pessimistic   ///< exhausted trials counted as failures
    };

    inline auto to_string(EstimateKind kind) -> std::string
    {
        switch (kind) {
            case EstimateKind::point:       return "point";
            case EstimateKind::optimistic:  return "optimistic";
            case EstimateKind::pessimistic: return "pessimistic";
        }
        return "?";
    }

    struct TrialOutcome
    {
        std::uint64_t successes = 0;
        std::uint64_t failures = 0;
        std::uint64_t budget_exhausted = 0;
        std::vector<TrialRecord> records;

        auto trials() const -> std::uint64_t
        {
            return successes + failures + budget_exhausted;
        }

        auto decided() const -> std::uint64_t
        {
            return successes + failures;
        }

        /// successes / decided trials; 1/2 when nothing was decided.
        auto point_estimate() const -> Rational
        {
            if (decided() == 0)
                return Rational{1, 2};
            return Rational{std::int64_t(successes), std::int64_t(decided())};
        }

        auto confidence_interval() const -> Interval
        {
            return wilson_interval(successes, decided());
        }

        auto optimistic_estimate() const -> Rational
        {
            return Rational{std::int64_t(successes + budget_exhausted), std::int64_t(std::max<std::uint64_t>(trials(), 1))};
        }

        auto pessimistic_estimate() const -> Rational
        {
            return Rational{std::int64_t(successes), std::int64_t(std::max<std::uint64_t>(trials(), 1))};
        }

        auto estimate(EstimateKind kind) const -> Rational
        {
            switch (kind) {
                case EstimateKind::point:       return point_estimate();
                case EstimateKind::optimistic:  return optimistic_estimate();
                case EstimateKind::pessimistic: return pessimistic_estimate();
            }
            return point_estimate();
        }

        auto interval(EstimateKind kind) const -> Interval
        {
            switch (kind) {
                case EstimateKind::point:       return confidence_interval();
                case EstimateKind::optimistic:  return wilson_interval(successes + budget_exhausted, trials());
                case EstimateKind::pessimistic: return wilson_interval(successes, trials());
            }
            return confidence_interval();
        }
    };

    inline auto rational_to_double(const Rational & q) -> double
    {
        return double(q.numerator()) / double(q.denominator());
    }

    inline auto run_trial(const TrialPlan & plan, std::uint64_t trial) -> TrialRecord
    {
        auto start = std::chrono::steady_clock::now();
        auto set = sample_binomial_set(plan.n, plan.p, plan.seed, trial);
        auto check = check_property(plan.property, set, plan.node_budget);
        return TrialRecord{trial, set.size(), check.verdict, check.nodes_explored,
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start)};
    }

    namespace detail
    {
        /// Runs trials [from, to) across worker threads; records land in
        /// trial order whatever the scheduling.
        inline auto run_trials(const TrialPlan & plan, std::uint64_t from, std::uint64_t to) -> std::vector<TrialRecord>
        {
            std::vector<TrialRecord> records(to - from);
            auto threads = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
            threads = unsigned(std::min<std::uint64_t>(threads, to - from));
            if (threads <= 1) {
                for (auto t = from ; t < to ; ++t)
                    records[t - from] = run_trial(plan, t);
                return records;
            }

            std::atomic<std::uint64_t> next{from};
            std::exception_ptr failure;
            std::atomic<bool> failed{false};
            std::vector<std::thread> workers;
            for (unsigned w = 0 ; w < threads ; ++w)
                workers.emplace_back([&] {
                        try {
                            for (auto t = next++ ; t < to && ! failed ; t = next++)
                                records[t - from] = run_trial(plan, t);
                        }
                        catch (...) {
                            if (! failed.exchange(true))
                                failure = std::current_exception();
                        }
                        });
            for (auto & w : workers)
                w.join();
            if (failure)
                std::rethrow_exception(failure);
            return records;
        }

        inline auto excludes(const Interval & interval, const Rational & target) -> bool
        {
            auto t = rational_to_double(target);
            return interval.hi < t || interval.lo > t;
        }
    }

    /// Runs the plan's trials, optionally stopping early in fixed batches.
    /// Trial i always sees the set sampled from (seed, i).
    inline auto estimate_probability(const TrialPlan & plan) -> TrialOutcome
    {
        check_probability(plan.p);
        if (plan.trials < 1)
            throw InvalidParameter("a trial plan needs at least one trial");
        if (plan.early_stop && plan.early_stop->batch < 1)
            throw InvalidParameter("early-stop batch size must be positive");

        TrialOutcome outcome;
        std::uint64_t done = 0;
        while (done < plan.trials) {
            auto step = plan.early_stop ? std::min<std::uint64_t>(plan.early_stop->batch, plan.trials - done) : plan.trials - done;
            for (auto & record : detail::run_trials(plan, done, done + step)) {
                switch (record.verdict) {
                    case Verdict::holds:            ++outcome.successes;        break;
                    case Verdict::fails:            ++outcome.failures;         break;
                    case Verdict::budget_exhausted: ++outcome.budget_exhausted; break;
                }
                outcome.records.push_back(record);
            }
            done += step;
            if (plan.early_stop && detail::excludes(outcome.confidence_interval(), plan.early_stop->target))
                break;
        }
        return outcome;
    }

    class ThresholdDiagnostic : public std::runtime_error
    {
        public:
            enum class Kind { no_crossing, non_monotone };

            ThresholdDiagnostic(Kind kind, const std::string & message) :
                std::runtime_error(message),
                _kind(kind)
            {
            }

            auto kind() const -> Kind
            {
                return _kind;
            }

        private:
            Kind _kind;
    };

    struct ThresholdQuery
    {
        Integer n = 0;
        Property property = property::CanVdW{};
        std::size_t trials = 200;
        std::uint64_t seed = 0;
        Rational target{1, 2};
        Rational resolution{1, 64};   ///< stop once p_hi - p_lo is at most this
        std::uint64_t node_budget = std::numeric_limits<std::uint64_t>::max();
        bool early_stop = false;
        std::size_t early_stop_batch = 50;
        unsigned threads = 0;
    };

    struct Probe
    {
        Rational p;
        TrialOutcome outcome;
    };

    struct ThresholdResult
    {
        EstimateKind kind = EstimateKind::point;
        Rational p_lo{0}, p_hi{1};
        Rational estimate_lo{0}, estimate_hi{1};

        auto p_star() const -> Rational
        {
            return (p_lo + p_hi) / 2;
        }
    };

    /// Bisection for the target crossing of an increasing property. Probes
    /// sit at dyadic p and share the seed, so every probe sees nested
    /// samples. Probe outcomes are cached, so locating the point,
    /// optimistic and pessimistic crossings costs little more than one.
    class ThresholdBisector
    {
        private:
            ThresholdQuery _query;
            std::map<Rational, TrialOutcome> _cache;

        public:
            explicit ThresholdBisector(ThresholdQuery query) :
                _query(std::move(query))
            {
                check_probability(_query.target);
                if (_query.resolution <= 0)
                    throw InvalidParameter("bisection resolution must be positive");
                if (_query.trials < 1)
                    throw InvalidParameter("a probe needs at least one trial");
            }

            auto query() const -> const ThresholdQuery &
            {
                return _query;
            }

            auto probe(const Rational & p) -> const TrialOutcome &
            {
                auto it = _cache.find(p);
                if (it != _cache.end())
                    return it->second;
                TrialPlan plan;
                plan.n = _query.n;
                plan.p = p;
                plan.trials = _query.trials;
                plan.seed = _query.seed;
                plan.property = _query.property;
                plan.node_budget = _query.node_budget;
                plan.threads = _query.threads;
                if (_query.early_stop)
                    plan.early_stop = EarlyStop{_query.target, _query.early_stop_batch};
                return _cache.emplace(p, estimate_probability(plan)).first->second;
            }

            /// Every probe run so far, in increasing p.
            auto probes() const -> std::vector<Probe>
            {
                std::vector<Probe> result;
                for (auto & [p, outcome] : _cache)
                    result.push_back(Probe{p, outcome});
                return result;
            }

            auto locate(EstimateKind kind) -> ThresholdResult
            {
                auto & target = _query.target;
                auto above = [&] (const TrialOutcome & o) { return o.estimate(kind) >= target; };
                // lo's interval entirely above hi's: disagreement beyond noise
                auto out_of_order = [&] (const TrialOutcome & lo, const TrialOutcome & hi) {
                    return lo.interval(kind).lo > hi.interval(kind).hi;
                };

                Rational lo{0}, hi{1};
                auto at_lo = probe(lo), at_hi = probe(hi);
                if (out_of_order(at_lo, at_hi))
                    throw ThresholdDiagnostic(ThresholdDiagnostic::Kind::non_monotone,
                            "estimate at p=0 exceeds estimate at p=1 beyond noise (" + to_string(at_lo.estimate(kind)) +
                            " vs " + to_string(at_hi.estimate(kind)) + "); property is not increasing");
                if (above(at_lo) || ! above(at_hi))
                    throw ThresholdDiagnostic(ThresholdDiagnostic::Kind::no_crossing,
                            "no crossing of " + to_string(target) + " on [0, 1]: " + to_string(kind) + " estimates are " +
                            to_string(at_lo.estimate(kind)) + " at p=0 and " + to_string(at_hi.estimate(kind)) + " at p=1");

                while (hi - lo > _query.resolution) {
                    auto mid = (lo + hi) / 2;
                    auto at_mid = probe(mid);
                    if (out_of_order(at_lo, at_mid) || out_of_order(at_mid, at_hi))
                        throw ThresholdDiagnostic(ThresholdDiagnostic::Kind::non_monotone,
                                "non-monotone profile at p=" + to_string(mid) + ": estimates " + to_string(at_lo.estimate(kind)) +
                                ", " + to_string(at_mid.estimate(kind)) + ", " + to_string(at_hi.estimate(kind)) +
                                " at p=" + to_string(lo) + ", " + to_string(mid) + ", " + to_string(hi));
                    if (above(at_mid)) {
                        hi = mid;
                        at_hi = at_mid;
                    }
                    else {
                        lo = mid;
                        at_lo = at_mid;
                    }
                }
                return ThresholdResult{kind, lo, hi, at_lo.estimate(kind), at_hi.estimate(kind)};
            }
    };

    inline auto threshold_bisect(const ThresholdQuery & query, EstimateKind kind = EstimateKind::point) -> ThresholdResult
    {
        ThresholdBisector bisector{query};
        return bisector.locate(kind);
    }

    struct ScalingRow
    {
        Integer n = 0;
        ThresholdResult point, optimistic, pessimistic;
        std::uint64_t budget_exhausted = 0;   ///< over all probes at this n

        auto result(EstimateKind kind) const -> const ThresholdResult &
        {
            switch (kind) {
                case EstimateKind::point:       return point;
                case EstimateKind::optimistic:  return optimistic;
                case EstimateKind::pessimistic: return pessimistic;
            }
            return point;
        }
    };

    struct ScalingTable
    {
        unsigned k = 3;
        std::vector<ScalingRow> rows;

        /// p* n^{1/(k-1)}
        auto normalized(const ScalingRow & row, EstimateKind kind) const -> double
        {
            return rational_to_double(row.result(kind).p_star()) * std::pow(double(row.n), 1.0 / double(k - 1));
        }

        /// max / min of the normalized column.
        auto ratio(EstimateKind kind) const -> double
        {
            if (rows.empty())
                return 1.0;
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (auto & row : rows) {
                auto v = normalized(row, kind);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            return hi / lo;
        }
    };

    struct ScalingOptions
    {
        std::size_t trials = 200;
        std::uint64_t seed = 0;
        Rational resolution{1, 256};
        std::uint64_t node_budget = std::numeric_limits<std::uint64_t>::max();
        bool early_stop = false;
        unsigned threads = 0;
    };

    /// Locates the can-k-vdW crossing of 1/2 for each n, reading budget
    /// exhaustion three ways.
    inline auto scaling_experiment(unsigned k, const std::vector<Integer> & ns, const ScalingOptions & options) -> ScalingTable
    {
        check_progression_length(k);
        if (! std::is_sorted(ns.begin(), ns.end()))
            throw InvalidParameter("scaling experiment needs ascending n values");

        ScalingTable table;
        table.k = k;
        for (auto n : ns) {
            ThresholdQuery query;
            query.n = n;
            query.property = property::CanVdW{k};
            query.trials = options.trials;
            query.seed = options.seed;
            query.resolution = options.resolution;
            query.node_budget = options.node_budget;
            query.early_stop = options.early_stop;
            query.threads = options.threads;

            ThresholdBisector bisector{query};
            ScalingRow row;
            row.n = n;
            row.point = bisector.locate(EstimateKind::point);
            row.optimistic = bisector.locate(EstimateKind::optimistic);
            row.pessimistic = bisector.locate(EstimateKind::pessimistic);
            for (auto & probe : bisector.probes())
                row.budget_exhausted += probe.outcome.budget_exhausted;
            table.rows.push_back(row);
        }
        return table;
    }

    struct SearchAttempt
    {
        std::uint64_t attempt = 0;
        std::size_t set_size = 0;
        bool girth_ok = false;
        std::optional<Verdict> canvdw;   ///< not run when the girth check fails
        std::uint64_t nodes_explored = 0;
    };

    struct SparseSearchResult
    {
        std::optional<GroundSet> witness;
        std::vector<SearchAttempt> attempts;
    };

    /// Samples [n]_p until one sample has H_kAP girth at least g and is
    /// can-k-vdW. The girth check runs first since it is cheap.
    inline auto search_sparse_canvdw(unsigned k, std::size_t g, Integer n, const Rational & p, std::size_t max_attempts,
            std::uint64_t seed, std::uint64_t node_budget = std::numeric_limits<std::uint64_t>::max()) -> SparseSearchResult
    {
        check_progression_length(k);
        check_probability(p);
        if (g < 2)
            throw InvalidParameter("girth bound must be at least 2");

        DeciderOptions options;
        options.node_budget = node_budget;
        SparseSearchResult result;
        for (std::uint64_t attempt = 0 ; attempt < max_attempts ; ++attempt) {
            auto set = sample_binomial_set(n, p, seed, attempt);
            SearchAttempt log{attempt, set.size(), has_girth_at_least(build_ap_hypergraph(set, k), g), std::nullopt, 0};
            if (log.girth_ok) {
                auto decision = is_can_k_vdW(set, k, options);
                log.canvdw = decision.verdict;
                log.nodes_explored = decision.nodes_explored;
            }
            result.attempts.push_back(log);
            if (log.canvdw == Verdict::holds) {
                result.witness = std::move(set);
                break;
            }
        }
        return result;
    }
}

#endif
