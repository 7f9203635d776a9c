/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_DECIDER_HH
#define CANVDW_GUARD_DECIDER_HH 1

#include <canvdw/ap_core.hh>
#include <canvdw/colouring.hh>
#include <canvdw/detail/partition_search.hh>
#include <canvdw/errors.hh>
#include <canvdw/rational.hh>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace canvdw
{
    enum class Verdict
    {
        holds,
        fails,
        budget_exhausted
    };

    inline auto to_string(Verdict v) -> std::string
    {
        switch (v) {
            case Verdict::holds:            return "holds";
            case Verdict::fails:            return "fails";
            case Verdict::budget_exhausted: return "budget-exhausted";
        }
        return "?";
    }

    /// Outcome of one decision. When a Ramsey-type property fails the
    /// certificate is a colouring witnessing that; for the Szemeredi property
    /// it is an AP-free subset.
    struct DecisionResult
    {
        Verdict verdict = Verdict::budget_exhausted;
        std::variant<std::monostate, Colouring, GroundSet> certificate;
        std::uint64_t nodes_explored = 0;
        std::chrono::nanoseconds elapsed{0};

        auto holds() const -> bool
        {
            return verdict == Verdict::holds;
        }

        auto fails() const -> bool
        {
            return verdict == Verdict::fails;
        }

        auto colouring() const -> const Colouring *
        {
            return std::get_if<Colouring>(&certificate);
        }

        auto subset() const -> const GroundSet *
        {
            return std::get_if<GroundSet>(&certificate);
        }
    };

    struct DeciderOptions
    {
        std::uint64_t node_budget = std::numeric_limits<std::uint64_t>::max();
        VariableOrder order = VariableOrder::smallest_domain;

        /// Peel elements whose constraints can always be met and split the
        /// rest into connected components of H_kAP. Verdict-preserving; off
        /// only to cross-check the reduction.
        bool decompose = true;

        /// Restrict (alpha,k)-rb searches to floor(4/alpha) colours.
        bool cap_alpha_palette = true;

        /// When non-zero, a failing colouring verdict is followed by a
        /// second search in plain element order (at most this many nodes)
        /// whose certificate is the lexicographically first restricted-growth
        /// colouring. The first certificate is kept if that search runs out.
        std::uint64_t canonical_certificate_budget = 0;
    };

    namespace detail
    {
        using Clock = std::chrono::steady_clock;

        struct APIndex
        {
            unsigned k = 3;
            std::size_t size = 0;
            std::vector<std::uint32_t> edges;           // flat k-tuples of element indices
            std::vector<std::vector<std::uint32_t>> incident;

            auto num_edges() const -> std::size_t
            {
                return edges.size() / k;
            }
        };

        inline auto index_aps(const GroundSet & set, unsigned k) -> APIndex
        {
            APIndex result;
            result.k = k;
            result.size = set.size();
            result.incident.resize(set.size());
            for (auto & ap : enumerate_aps(set, k)) {
                auto e = std::uint32_t(result.num_edges());
                for (unsigned i = 0 ; i < k ; ++i) {
                    auto v = std::uint32_t(*set.index_of(ap.element(i)));
                    result.edges.push_back(v);
                    result.incident[v].push_back(e);
                }
            }
            return result;
        }

        struct Peeling
        {
            std::vector<std::uint32_t> order;                 // peel order
            std::vector<std::vector<std::uint32_t>> live;     // live APs of each vertex when peeled
            std::vector<bool> removed;
            std::vector<bool> edge_alive;
        };

        /// Repeatedly removes vertices lying in at most max_degree live APs,
        /// killing those APs.
        inline auto peel(const APIndex & index, std::size_t max_degree) -> Peeling
        {
            Peeling result;
            result.removed.assign(index.size, false);
            result.edge_alive.assign(index.num_edges(), true);
            result.live.resize(index.size);
            std::vector<std::size_t> degree(index.size);
            std::vector<std::uint32_t> queue;
            for (std::uint32_t v = 0 ; v < index.size ; ++v) {
                degree[v] = index.incident[v].size();
                if (degree[v] <= max_degree)
                    queue.push_back(v);
            }

            for (std::size_t head = 0 ; head < queue.size() ; ++head) {
                auto v = queue[head];
                if (result.removed[v])
                    continue;
                result.removed[v] = true;
                result.order.push_back(v);
                for (auto e : index.incident[v]) {
                    if (! result.edge_alive[e])
                        continue;
                    result.edge_alive[e] = false;
                    result.live[v].push_back(e);
                    for (unsigned i = 0 ; i < index.k ; ++i) {
                        auto u = index.edges[e * index.k + i];
                        if (u != v && ! result.removed[u] && --degree[u] == max_degree)
                            queue.push_back(u);
                    }
                }
            }
            return result;
        }

        /// Connected components of the unpeeled vertices under live edges,
        /// each listed in increasing vertex order.
        inline auto components(const APIndex & index, const Peeling & peeling) -> std::vector<std::vector<std::uint32_t>>
        {
            std::vector<std::uint32_t> parent(index.size);
            std::iota(parent.begin(), parent.end(), 0);
            auto find = [&] (std::uint32_t v) {
                while (parent[v] != v)
                    v = parent[v] = parent[parent[v]];
                return v;
            };
            for (std::size_t e = 0 ; e < index.num_edges() ; ++e) {
                if (! peeling.edge_alive[e])
                    continue;
                for (unsigned i = 1 ; i < index.k ; ++i) {
                    auto a = find(index.edges[e * index.k]), b = find(index.edges[e * index.k + i]);
                    if (a != b)
                        parent[std::max(a, b)] = std::min(a, b);
                }
            }

            std::vector<std::vector<std::uint32_t>> result;
            std::vector<std::int64_t> slot(index.size, -1);
            for (std::uint32_t v = 0 ; v < index.size ; ++v) {
                if (peeling.removed[v])
                    continue;
                auto root = find(v);
                if (slot[root] == -1) {
                    slot[root] = std::int64_t(result.size());
                    result.emplace_back();
                }
                result[std::size_t(slot[root])].push_back(v);
            }
            return result;
        }

        /// Edges of the sub-instance induced by a vertex list, relabelled to
        /// positions in that list.
        inline auto induced_edges(const APIndex & index, const std::vector<std::uint32_t> & vertices,
                const std::vector<bool> & edge_alive) -> std::vector<std::uint32_t>
        {
            std::vector<std::int64_t> position(index.size, -1);
            for (std::size_t i = 0 ; i < vertices.size() ; ++i)
                position[vertices[i]] = std::int64_t(i);

            std::vector<std::uint32_t> result;
            std::vector<bool> seen(index.num_edges(), false);
            for (auto v : vertices)
                for (auto e : index.incident[v]) {
                    if (seen[e] || ! edge_alive[e])
                        continue;
                    seen[e] = true;
                    bool inside = true;
                    for (unsigned i = 0 ; i < index.k && inside ; ++i)
                        inside = position[index.edges[e * index.k + i]] != -1;
                    if (! inside)
                        continue;
                    for (unsigned i = 0 ; i < index.k ; ++i)
                        result.push_back(std::uint32_t(position[index.edges[e * index.k + i]]));
                }
            return result;
        }

        /// Replaces a failing verdict's certificate with the lexicographically
        /// first admissible restricted-growth colouring, if found in budget.
        inline auto canonicalise_certificate(DecisionResult & result, const GroundSet & set, unsigned k,
                const PartitionRules & rules, const DeciderOptions & options) -> void
        {
            if (options.canonical_certificate_budget == 0 || result.verdict != Verdict::fails || set.empty())
                return;
            auto index = index_aps(set, k);
            std::vector<std::uint32_t> all(index.size);
            std::iota(all.begin(), all.end(), 0);
            std::uint64_t nodes = 0;
            PartitionSearch search{index.size, k, induced_edges(index, all, std::vector<bool>(index.num_edges(), true)), rules,
                VariableOrder::increasing, nodes, options.canonical_certificate_budget};
            if (search.run() == PartitionOutcome::found)
                result.certificate = Colouring{set, std::vector<Colour>(search.colours().begin(), search.colours().end())};
        }

        /// Decides whether A admits a colouring in which no AP is
        /// monochromatic (if forbidden) and none is rainbow (if forbidden),
        /// with at most palette_cap colours. Peelable vertices are those in
        /// at most peel_degree APs; they are coloured afterwards by
        /// extend_colour.
        template <typename Extend_>
        auto decide_by_partition(const GroundSet & set, unsigned k, PartitionRules rules, std::size_t peel_degree,
                const DeciderOptions & options, Extend_ && extend_colour) -> DecisionResult
        {
            auto start = Clock::now();
            DecisionResult result;
            auto index = index_aps(set, k);

            Peeling peeling;
            std::vector<std::vector<std::uint32_t>> parts;
            if (options.decompose) {
                peeling = peel(index, peel_degree);
                parts = components(index, peeling);
            }
            else {
                peeling.removed.assign(index.size, false);
                peeling.edge_alive.assign(index.num_edges(), true);
                peeling.live.resize(index.size);
                if (index.size > 0) {
                    parts.emplace_back(index.size);
                    std::iota(parts.back().begin(), parts.back().end(), 0);
                }
            }

            std::vector<std::uint32_t> colour(index.size, uncoloured);
            for (auto & part : parts) {
                PartitionSearch search{part.size(), k, induced_edges(index, part, peeling.edge_alive), rules,
                    options.order, result.nodes_explored, options.node_budget};
                auto outcome = search.run();
                if (outcome != PartitionOutcome::found) {
                    result.verdict = outcome == PartitionOutcome::exhausted ? Verdict::holds : Verdict::budget_exhausted;
                    result.elapsed = Clock::now() - start;
                    return result;
                }
                for (std::size_t i = 0 ; i < part.size() ; ++i)
                    colour[part[i]] = search.colours()[i];
            }

            std::vector<std::uint32_t> others;
            for (auto it = peeling.order.rbegin() ; it != peeling.order.rend() ; ++it) {
                std::vector<std::vector<std::uint32_t>> constraints;
                for (auto e : peeling.live[*it]) {
                    others.clear();
                    for (unsigned i = 0 ; i < k ; ++i)
                        if (auto u = index.edges[e * k + i] ; u != *it)
                            others.push_back(colour[u]);
                    constraints.push_back(others);
                }
                colour[*it] = extend_colour(constraints);
            }

            result.verdict = Verdict::fails;
            result.certificate = normalize(set, colour);
            canonicalise_certificate(result, set, k, rules, options);
            result.elapsed = Clock::now() - start;
            return result;
        }

        inline auto all_equal(const std::vector<std::uint32_t> & colours) -> bool
        {
            return std::adjacent_find(colours.begin(), colours.end(), std::not_equal_to<>{}) == colours.end();
        }

        inline auto all_distinct(std::vector<std::uint32_t> colours) -> bool
        {
            std::sort(colours.begin(), colours.end());
            return std::adjacent_find(colours.begin(), colours.end()) == colours.end();
        }
    }

    /// (r,k)-vdW: every colouring of A with at most r colours has a
    /// monochromatic k-AP. A failing verdict carries such a colouring with
    /// no monochromatic k-AP.
    inline auto is_r_k_vdW(const GroundSet & set, unsigned r, unsigned k, const DeciderOptions & options = {}) -> DecisionResult
    {
        check_progression_length(k);
        if (r < 1)
            throw InvalidParameter("colour bound r must be at least 1");

        detail::PartitionRules rules;
        rules.forbid_monochromatic = true;
        rules.palette_cap = r;

        // with at most r-1 live APs some colour below r is never forbidden
        return detail::decide_by_partition(set, k, rules, r - 1, options,
                [] (const std::vector<std::vector<std::uint32_t>> & constraints) -> std::uint32_t {
                    std::vector<std::uint32_t> forbidden;
                    for (auto & others : constraints)
                        if (detail::all_equal(others))
                            forbidden.push_back(others.front());
                    std::uint32_t c = 0;
                    while (std::find(forbidden.begin(), forbidden.end(), c) != forbidden.end())
                        ++c;
                    return c;
                });
    }

    /// can-k-vdW: every colouring of A, with any number of colours, has a
    /// k-AP that is monochromatic or rainbow. A failing verdict carries a
    /// colouring under which every k-AP is neither.
    inline auto is_can_k_vdW(const GroundSet & set, unsigned k, const DeciderOptions & options = {}) -> DecisionResult
    {
        check_progression_length(k);

        detail::PartitionRules rules;
        rules.forbid_monochromatic = true;
        rules.forbid_rainbow = true;

        // an element in a single AP can always break that AP's pattern
        return detail::decide_by_partition(set, k, rules, 1, options,
                [] (const std::vector<std::vector<std::uint32_t>> & constraints) -> std::uint32_t {
                    if (constraints.empty())
                        return 0;
                    auto & others = constraints.front();
                    if (detail::all_equal(others))
                        return others.front() == 0 ? 1 : 0;
                    if (detail::all_distinct(others))
                        return others.front();
                    return 0;
                });
    }

    /// (alpha,k)-rb: every alpha-bounded colouring of A has a rainbow k-AP.
    /// By colour merging, a rainbow-free alpha-bounded colouring exists iff
    /// one with at most floor(4/alpha) colours does, so the search is capped
    /// there unless options.cap_alpha_palette is cleared.
    inline auto is_alpha_k_rb(const GroundSet & set, const Rational & alpha, unsigned k, const DeciderOptions & options = {}) -> DecisionResult
    {
        check_progression_length(k);
        check_unit_alpha(alpha);
        auto start = detail::Clock::now();

        DecisionResult result;
        auto total = std::int64_t(set.size());
        auto class_cap = floor_fraction_of(alpha, total);
        if (set.empty()) {
            result.verdict = Verdict::fails;
            result.certificate = Colouring{set, {}};
            result.elapsed = detail::Clock::now() - start;
            return result;
        }
        if (class_cap < 1) {
            result.verdict = Verdict::holds;
            result.elapsed = detail::Clock::now() - start;
            return result;
        }

        detail::PartitionRules rules;
        rules.forbid_rainbow = true;
        rules.class_cap = std::size_t(class_cap);
        if (options.cap_alpha_palette)
            rules.palette_cap = std::size_t(std::max<std::int64_t>(1, floor_fraction_of(Rational{4} / alpha, 1)));

        auto index = detail::index_aps(set, k);
        std::vector<std::uint32_t> core, isolated;
        for (std::uint32_t v = 0 ; v < index.size ; ++v)
            (index.incident[v].empty() && options.decompose ? isolated : core).push_back(v);

        auto edge_alive = std::vector<bool>(index.num_edges(), true);
        detail::PartitionSearch search{core.size(), k, detail::induced_edges(index, core, edge_alive), rules,
            options.order, result.nodes_explored, options.node_budget};
        auto outcome = search.run();
        if (outcome != detail::PartitionOutcome::found) {
            result.verdict = outcome == detail::PartitionOutcome::exhausted ? Verdict::holds : Verdict::budget_exhausted;
            result.elapsed = detail::Clock::now() - start;
            return result;
        }

        // isolated elements fill spare capacity: palette * cap >= |A| always
        std::vector<std::uint32_t> colour(index.size, detail::uncoloured);
        std::vector<std::size_t> count(std::min<std::size_t>(rules.palette_cap, index.size) + 1, 0);
        for (std::size_t i = 0 ; i < core.size() ; ++i) {
            colour[core[i]] = search.colours()[i];
            ++count[colour[core[i]]];
        }
        std::uint32_t c = 0;
        for (auto v : isolated) {
            while (count[c] >= std::size_t(class_cap))
                ++c;
            colour[v] = c;
            ++count[c];
        }

        result.verdict = Verdict::fails;
        result.certificate = normalize(set, colour);
        detail::canonicalise_certificate(result, set, k, rules, options);
        result.elapsed = detail::Clock::now() - start;
        return result;
    }

    /// Result of a maximum AP-free subset search.
    struct APFreeSearch
    {
        GroundSet subset;
        bool complete = true;
        std::uint64_t nodes_explored = 0;
    };

    namespace detail
    {
        /// Branch and bound for a maximum independent set of one component.
        /// Include-first over increasing vertices and strict improvement
        /// make the first maximum found the lexicographically smallest.
        class IndependentSetSearch
        {
            private:
                const APIndex & _index;
                const std::vector<std::uint32_t> & _vertices;
                std::vector<std::uint32_t> _included_in_edge;
                std::vector<std::uint32_t> _blocked;
                std::vector<bool> _chosen, _best;
                std::size_t _chosen_count = 0, _best_count = 0;
                std::uint64_t & _nodes;
                std::uint64_t _budget;
                bool _out_of_budget = false;

                auto bound(std::size_t from) const -> std::size_t
                {
                    std::size_t free = 0;
                    for (auto i = from ; i < _vertices.size() ; ++i)
                        if (_blocked[_vertices[i]] == 0)
                            ++free;
                    return _chosen_count + free;
                }

                auto include(std::uint32_t v, int sign) -> void
                {
                    for (auto e : _index.incident[v]) {
                        auto before = _included_in_edge[e];
                        _included_in_edge[e] = std::uint32_t(std::int64_t(before) + sign);
                        if ((sign > 0 && before + 1 == _index.k - 1) || (sign < 0 && before == _index.k - 1))
                            for (unsigned i = 0 ; i < _index.k ; ++i) {
                                auto u = _index.edges[e * _index.k + i];
                                if (! _chosen[u])
                                    _blocked[u] = std::uint32_t(std::int64_t(_blocked[u]) + sign);
                            }
                    }
                }

                auto search(std::size_t i) -> void
                {
                    if (++_nodes > _budget) {
                        _out_of_budget = true;
                        return;
                    }
                    if (i == _vertices.size()) {
                        if (_chosen_count > _best_count) {
                            _best_count = _chosen_count;
                            _best = _chosen;
                        }
                        return;
                    }
                    if (bound(i) <= _best_count)
                        return;

                    auto v = _vertices[i];
                    if (_blocked[v] == 0) {
                        _chosen[v] = true;
                        ++_chosen_count;
                        include(v, +1);
                        search(i + 1);
                        include(v, -1);
                        --_chosen_count;
                        _chosen[v] = false;
                        if (_out_of_budget)
                            return;
                    }
                    search(i + 1);
                }

            public:
                IndependentSetSearch(const APIndex & index, const std::vector<std::uint32_t> & vertices,
                        std::uint64_t & nodes, std::uint64_t budget) :
                    _index(index),
                    _vertices(vertices),
                    _included_in_edge(index.num_edges(), 0),
                    _blocked(index.size, 0),
                    _chosen(index.size, false),
                    _best(index.size, false),
                    _nodes(nodes),
                    _budget(budget)
                {
                }

                /// Returns false if the budget ran out; best() is then the
                /// best set found so far.
                auto run() -> bool
                {
                    search(0);
                    return ! _out_of_budget;
                }

                auto best() const -> const std::vector<bool> &
                {
                    return _best;
                }
        };
    }

    /// A maximum-cardinality subset of A with no k-AP; among those, the
    /// lexicographically smallest. complete is false if the node budget ran
    /// out, in which case the subset is AP-free but maybe not maximum.
    inline auto search_max_ap_free_subset(const GroundSet & set, unsigned k, const DeciderOptions & options = {}) -> APFreeSearch
    {
        APFreeSearch result;
        auto index = detail::index_aps(set, k);
        detail::Peeling none;
        none.removed.assign(index.size, false);
        none.edge_alive.assign(index.num_edges(), true);

        std::vector<std::vector<std::uint32_t>> parts;
        if (options.decompose)
            parts = detail::components(index, none);
        else if (index.size > 0) {
            parts.emplace_back(index.size);
            std::iota(parts.back().begin(), parts.back().end(), 0);
        }

        std::vector<Integer> chosen;
        for (auto & part : parts) {
            detail::IndependentSetSearch search{index, part, result.nodes_explored, options.node_budget};
            if (! search.run())
                result.complete = false;
            for (auto v : part)
                if (search.best()[v])
                    chosen.push_back(set[v]);
        }
        std::sort(chosen.begin(), chosen.end());
        result.subset = GroundSet{std::move(chosen), set.ambient_bound()};
        return result;
    }

    /// Throws BudgetExceeded if options.node_budget runs out.
    inline auto max_ap_free_subset(const GroundSet & set, unsigned k, const DeciderOptions & options = {}) -> GroundSet
    {
        check_progression_length(k);
        auto result = search_max_ap_free_subset(set, k, options);
        if (! result.complete)
            throw BudgetExceeded("maximum AP-free subset search ran out of nodes");
        return std::move(result.subset);
    }

    /// (alpha,k)-Sz: every B in A with |B| >= alpha |A| contains a k-AP,
    /// i.e. the largest AP-free subset has fewer than alpha |A| elements.
    inline auto is_alpha_k_Sz(const GroundSet & set, const Rational & alpha, unsigned k, const DeciderOptions & options = {}) -> DecisionResult
    {
        check_progression_length(k);
        check_unit_alpha(alpha);
        auto start = detail::Clock::now();

        DecisionResult result;
        auto search = search_max_ap_free_subset(set, k, options);
        result.nodes_explored = search.nodes_explored;
        auto reaches = at_least_fraction_of(std::int64_t(search.subset.size()), alpha, std::int64_t(set.size()));
        if (reaches) {
            result.verdict = Verdict::fails;
            result.certificate = std::move(search.subset);
        }
        else
            result.verdict = search.complete ? Verdict::holds : Verdict::budget_exhausted;
        result.elapsed = detail::Clock::now() - start;
        return result;
    }
}

#endif
