/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_HYPERGRAPH_CYCLES_HH
#define CANVDW_GUARD_HYPERGRAPH_CYCLES_HH 1

#include <canvdw/ap_core.hh>
#include <canvdw/errors.hh>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace canvdw
{
    /// Bipartite graph on V(H) + E(H): node v < num_vertices is a vertex,
    /// node num_vertices + e is edge e, adjacent when v lies in e.
    class IncidenceGraph
    {
        private:
            std::size_t _num_vertices, _num_edges;
            std::vector<std::vector<std::uint32_t>> _adjacency;

        public:
            IncidenceGraph(std::size_t num_vertices, std::size_t num_edges) :
                _num_vertices(num_vertices),
                _num_edges(num_edges),
                _adjacency(num_vertices + num_edges)
            {
            }

            auto num_vertex_nodes() const -> std::size_t { return _num_vertices; }
            auto num_edge_nodes() const -> std::size_t { return _num_edges; }
            auto num_nodes() const -> std::size_t { return _adjacency.size(); }

            auto edge_node(std::size_t e) const -> std::uint32_t
            {
                return std::uint32_t(_num_vertices + e);
            }

            auto is_edge_node(std::uint32_t node) const -> bool
            {
                return node >= _num_vertices;
            }

            auto add_incidence(std::uint32_t v, std::size_t e) -> void
            {
                _adjacency[v].push_back(edge_node(e));
                _adjacency[edge_node(e)].push_back(v);
            }

            auto neighbours(std::uint32_t node) const -> const std::vector<std::uint32_t> &
            {
                return _adjacency[node];
            }

            auto num_incidences() const -> std::size_t
            {
                std::size_t total = 0;
                for (std::size_t v = 0 ; v < _num_vertices ; ++v)
                    total += _adjacency[v].size();
                return total;
            }
    };

    template <typename Vertex_>
    auto incidence_graph(const UniformHypergraph<Vertex_> & h) -> IncidenceGraph
    {
        IncidenceGraph result{h.num_vertices(), h.num_edges()};
        for (std::size_t e = 0 ; e < h.num_edges() ; ++e)
            for (auto v : h.edge(e))
                result.add_incidence(v, e);
        return result;
    }

    /// Length of a shortest cycle, or infinity for an acyclic hypergraph.
    class Girth
    {
        private:
            std::optional<std::size_t> _length;

            explicit Girth(std::optional<std::size_t> length) :
                _length(length)
            {
            }

        public:
            static auto infinity() -> Girth
            {
                return Girth{std::nullopt};
            }

            static auto finite(std::size_t length) -> Girth
            {
                return Girth{length};
            }

            auto is_infinite() const -> bool
            {
                return ! _length.has_value();
            }

            /// Throws if infinite.
            auto value() const -> std::size_t
            {
                if (! _length)
                    throw PreconditionViolation("girth is infinite");
                return *_length;
            }

            auto at_least(std::size_t g) const -> bool
            {
                return ! _length || *_length >= g;
            }

            auto operator== (const Girth &) const -> bool = default;

            auto operator<=> (const Girth & other) const -> std::strong_ordering
            {
                if (is_infinite() || other.is_infinite())
                    return is_infinite() <=> other.is_infinite();
                return *_length <=> *other._length;
            }
    };

    inline auto to_string(const Girth & g) -> std::string
    {
        return g.is_infinite() ? std::string{"infinity"} : std::to_string(g.value());
    }

    namespace detail
    {
        /// Some pair of edges shares two or more vertices.
        template <typename Vertex_>
        auto has_two_cycle(const UniformHypergraph<Vertex_> & h) -> bool
        {
            std::vector<std::uint64_t> pairs;
            for (std::size_t e = 0 ; e < h.num_edges() ; ++e) {
                auto edge = h.edge(e);
                for (std::size_t i = 0 ; i < edge.size() ; ++i)
                    for (std::size_t j = i + 1 ; j < edge.size() ; ++j)
                        pairs.push_back((std::uint64_t(edge[i]) << 32) | edge[j]);
            }
            std::sort(pairs.begin(), pairs.end());
            return std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end();
        }

        /// Shortest cycle length in a graph, considering only cycles of
        /// length at most limit; nullopt when there is none. BFS from every
        /// node; a non-tree edge (u, w) closes a walk of length
        /// dist u + dist w + 1 containing a cycle at most that long, and the
        /// minimum over sources is exact.
        inline auto shortest_cycle(const IncidenceGraph & g, std::size_t limit) -> std::optional<std::size_t>
        {
            constexpr auto unseen = std::numeric_limits<std::uint32_t>::max();
            std::optional<std::size_t> best;
            std::vector<std::uint32_t> dist(g.num_nodes(), unseen), parent(g.num_nodes(), unseen), touched;
            std::vector<std::uint32_t> queue;

            for (std::uint32_t s = 0 ; s < g.num_nodes() ; ++s) {
                if (g.neighbours(s).size() < 2)
                    continue;
                for (auto t : touched)
                    dist[t] = parent[t] = unseen;
                touched.clear();
                queue.clear();

                dist[s] = 0;
                touched.push_back(s);
                queue.push_back(s);
                auto cap = best ? std::min(*best - 1, limit) : limit;
                for (std::size_t head = 0 ; head < queue.size() ; ++head) {
                    auto u = queue[head];
                    // a cycle found from here has length at least 2 dist u
                    if (2 * std::size_t(dist[u]) > cap)
                        break;
                    for (auto w : g.neighbours(u)) {
                        if (dist[w] == unseen) {
                            dist[w] = dist[u] + 1;
                            parent[w] = u;
                            touched.push_back(w);
                            queue.push_back(w);
                        }
                        else if (w != parent[u]) {
                            auto length = std::size_t(dist[u]) + dist[w] + 1;
                            if (length <= cap) {
                                best = length;
                                cap = length - 1;
                            }
                        }
                    }
                }
            }
            return best;
        }
    }

    /// girth(H) = (shortest cycle of the incidence graph) / 2.
    template <typename Vertex_>
    auto girth(const UniformHypergraph<Vertex_> & h) -> Girth
    {
        if (detail::has_two_cycle(h))
            return Girth::finite(2);
        auto g = incidence_graph(h);
        auto shortest = detail::shortest_cycle(g, std::numeric_limits<std::size_t>::max());
        return shortest ? Girth::finite(*shortest / 2) : Girth::infinity();
    }

    /// girth(H) >= g, stopping as soon as a shorter cycle is seen.
    template <typename Vertex_>
    auto has_girth_at_least(const UniformHypergraph<Vertex_> & h, std::size_t g) -> bool
    {
        if (g < 2)
            throw InvalidParameter("girth bound must be at least 2");
        if (g == 2)
            return true;
        if (detail::has_two_cycle(h))
            return false;
        auto graph = incidence_graph(h);
        return ! detail::shortest_cycle(graph, 2 * g - 2);
    }

    /// Edges e_1..e_l and distinct linking vertices v_1..v_l with
    /// v_i in e_i and e_{i+1} (indices cyclic). Indices refer to the
    /// hypergraph's vertex and edge numbering.
    struct HypergraphCycle
    {
        std::vector<std::uint32_t> linking_vertices;
        std::vector<std::uint32_t> edges;

        auto length() const -> std::size_t
        {
            return edges.size();
        }

        auto sorted_edges() const -> std::vector<std::uint32_t>
        {
            auto result = edges;
            std::sort(result.begin(), result.end());
            return result;
        }

        auto operator== (const HypergraphCycle &) const -> bool = default;
    };

    template <typename Vertex_>
    auto is_valid_cycle(const UniformHypergraph<Vertex_> & h, const HypergraphCycle & c) -> bool
    {
        auto l = c.length();
        if (l < 2 || c.linking_vertices.size() != l)
            return false;
        auto distinct = [] (std::vector<std::uint32_t> v) {
            std::sort(v.begin(), v.end());
            return std::adjacent_find(v.begin(), v.end()) == v.end();
        };
        if (! distinct(c.edges) || ! distinct(c.linking_vertices))
            return false;
        auto in = [&] (std::uint32_t v, std::uint32_t e) {
            if (e >= h.num_edges())
                return false;
            auto edge = h.edge(e);
            return std::binary_search(edge.begin(), edge.end(), v);
        };
        for (std::size_t i = 0 ; i < l ; ++i)
            if (! in(c.linking_vertices[i], c.edges[i]) || ! in(c.linking_vertices[i], c.edges[(i + 1) % l]))
                return false;
        return true;
    }

    namespace detail
    {
        /// Whether the sub-hypergraph on the given edges has a cycle of
        /// length below `below`, by trying every sequence of distinct edges
        /// and distinct linking vertices.
        template <typename Vertex_>
        auto has_cycle_shorter_than(const UniformHypergraph<Vertex_> & h, const std::vector<std::uint32_t> & edges, std::size_t below) -> bool
        {
            std::vector<std::uint32_t> seq, links;
            std::vector<bool> used_edge(edges.size(), false);
            auto in = [&] (std::uint32_t v, std::uint32_t e) {
                auto edge = h.edge(e);
                return std::binary_search(edge.begin(), edge.end(), v);
            };

            auto rec = [&] (auto & self) -> bool {
                auto last = seq.back();
                if (seq.size() >= 2)
                    for (auto w : h.edge(edges[seq.front()]))
                        if (in(w, edges[last]) && std::find(links.begin(), links.end(), w) == links.end())
                            return true;
                if (seq.size() + 1 >= below)
                    return false;
                for (auto v : h.edge(edges[last])) {
                    if (std::find(links.begin(), links.end(), v) != links.end())
                        continue;
                    for (std::size_t f = 0 ; f < edges.size() ; ++f) {
                        if (used_edge[f] || ! in(v, edges[f]))
                            continue;
                        used_edge[f] = true;
                        seq.push_back(std::uint32_t(f));
                        links.push_back(v);
                        auto found = self(self);
                        links.pop_back();
                        seq.pop_back();
                        used_edge[f] = false;
                        if (found)
                            return true;
                    }
                }
                return false;
            };

            for (std::size_t f = 0 ; f < edges.size() ; ++f) {
                used_edge[f] = true;
                seq.assign(1, std::uint32_t(f));
                links.clear();
                auto found = rec(rec);
                used_edge[f] = false;
                if (found)
                    return true;
            }
            return false;
        }
    }

    inline constexpr std::uint64_t default_cycle_budget = 1'000'000'000;

    /// Calls visit(cycle) for every minimal cycle of length 2..max_length:
    /// cycles containing no shorter cycle among their own edges and spanned
    /// vertices. Throws BudgetExceeded after node_budget search steps.
    ///
    /// Each cycle is visited once, rotated so e_1 is its smallest edge and
    /// reflected so e_2 < e_l (for l = 2, so v_1 < v_2). Every prefix of a
    /// minimal cycle is a loose path (each new edge meets the earlier ones
    /// only at the linking vertex), which the search uses as a prune; the
    /// closing step is rechecked by brute force.
    template <typename Vertex_, typename Visit_>
    auto for_each_minimal_cycle(const UniformHypergraph<Vertex_> & h, std::size_t max_length, Visit_ && visit,
            std::uint64_t node_budget = default_cycle_budget) -> void
    {
        if (max_length < 2)
            throw InvalidParameter("maximum cycle length must be at least 2");

        std::uint64_t nodes = 0;
        HypergraphCycle cycle;
        auto tick = [&] {
            if (++nodes > node_budget)
                throw BudgetExceeded("minimal cycle enumeration exceeded " + std::to_string(node_budget) + " nodes");
        };

        auto incident = h.incident_edges();
        auto num_edges = h.num_edges();

        // length 2: two edges sharing at least two vertices
        for (std::uint32_t e1 = 0 ; e1 < num_edges ; ++e1)
            for (std::uint32_t e2 = e1 + 1 ; e2 < num_edges ; ++e2) {
                tick();
                std::vector<std::uint32_t> common;
                auto a = h.edge(e1), b = h.edge(e2);
                std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
                for (std::size_t i = 0 ; i < common.size() ; ++i)
                    for (std::size_t j = i + 1 ; j < common.size() ; ++j) {
                        cycle.edges = {e1, e2};
                        cycle.linking_vertices = {common[i], common[j]};
                        visit(std::as_const(cycle));
                    }
            }

        if (max_length >= 3) {
            constexpr auto far = std::numeric_limits<std::size_t>::max();
            std::vector<std::uint8_t> in_union(h.num_vertices(), 0);
            std::vector<std::size_t> distance(h.num_vertices(), far);
            std::vector<bool> in_first(h.num_vertices(), false);
            std::vector<std::uint32_t> edges, links;

            for (std::uint32_t e1 = 0 ; e1 < num_edges ; ++e1) {
                // distance[v]: edges (all > e1) needed to get from v into e1
                std::fill(distance.begin(), distance.end(), far);
                std::vector<std::uint32_t> frontier;
                for (auto v : h.edge(e1)) {
                    distance[v] = 0;
                    frontier.push_back(v);
                }
                for (std::size_t step = 1 ; step < max_length && ! frontier.empty() ; ++step) {
                    std::vector<std::uint32_t> next;
                    for (auto v : frontier)
                        for (auto e : incident[v])
                            if (e > e1)
                                for (auto w : h.edge(e))
                                    if (distance[w] == far) {
                                        distance[w] = step;
                                        next.push_back(w);
                                    }
                    frontier = std::move(next);
                }

                for (auto v : h.edge(e1)) {
                    in_union[v] = 1;
                    in_first[v] = true;
                }
                edges.assign(1, e1);
                links.clear();

                // edges[0..j-1] chosen; extend through a vertex of the last edge
                auto extend = [&] (auto & self) -> void {
                    auto j = edges.size();
                    auto last = edges.back();
                    for (auto v : h.edge(last)) {
                        if (in_union[v] != 1 || (j >= 2 && in_first[v]))
                            continue;
                        // v must reach e1 within the remaining edges
                        if (distance[v] == far || j + std::max<std::size_t>(distance[v], 1) > max_length)
                            continue;
                        for (auto e : incident[v]) {
                            if (e <= e1 || std::find(edges.begin(), edges.end(), e) != edges.end())
                                continue;
                            tick();

                            std::size_t shared = 0;
                            std::optional<std::uint32_t> closing;
                            for (auto w : h.edge(e))
                                if (in_union[w]) {
                                    ++shared;
                                    if (w != v)
                                        closing = w;
                                }

                            links.push_back(v);
                            if (shared == 1 && j + 1 < max_length) {
                                edges.push_back(e);
                                for (auto w : h.edge(e))
                                    ++in_union[w];
                                self(self);
                                for (auto w : h.edge(e))
                                    --in_union[w];
                                edges.pop_back();
                            }
                            else if (shared == 2 && j >= 2 && in_first[*closing] && *closing != links.front()
                                    && edges[1] < e) {
                                cycle.edges = edges;
                                cycle.edges.push_back(e);
                                cycle.linking_vertices = links;
                                cycle.linking_vertices.push_back(*closing);
                                if (! detail::has_cycle_shorter_than(h, cycle.edges, cycle.length()))
                                    visit(std::as_const(cycle));
                            }
                            links.pop_back();
                        }
                    }
                };
                extend(extend);

                for (auto v : h.edge(e1)) {
                    in_union[v] = 0;
                    in_first[v] = false;
                }
            }
        }

    }

    /// All minimal cycles of length 2..max_length in canonical form, sorted
    /// by sorted edge list, then edge sequence, then linking vertices.
    template <typename Vertex_>
    auto enumerate_minimal_cycles(const UniformHypergraph<Vertex_> & h, std::size_t max_length,
            std::uint64_t node_budget = default_cycle_budget) -> std::vector<HypergraphCycle>
    {
        std::vector<std::pair<std::vector<std::uint32_t>, HypergraphCycle>> keyed;
        for_each_minimal_cycle(h, max_length, [&] (const HypergraphCycle & c) {
                keyed.emplace_back(c.sorted_edges(), c);
                }, node_budget);
        std::sort(keyed.begin(), keyed.end(), [] (const auto & a, const auto & b) {
                if (a.first != b.first)
                    return a.first < b.first;
                if (a.second.edges != b.second.edges)
                    return a.second.edges < b.second.edges;
                return a.second.linking_vertices < b.second.linking_vertices;
                });
        std::vector<HypergraphCycle> result;
        result.reserve(keyed.size());
        for (auto & [key, c] : keyed)
            result.push_back(std::move(c));
        return result;
    }

    /// The vertex-span facts for one minimal cycle of length at least 3:
    /// it spans (k-1) l vertices, each linking vertex lies in exactly two
    /// of its edges and every other spanned vertex in exactly one.
    struct CycleSpanCheck
    {
        HypergraphCycle cycle;
        std::size_t span = 0;
        std::size_t expected_span = 0;
        bool linking_degrees_ok = false;
        bool other_degrees_ok = false;

        auto passes() const -> bool
        {
            return span == expected_span && linking_degrees_ok && other_degrees_ok;
        }
    };

    struct CycleSpanReport
    {
        std::map<std::size_t, std::uint64_t> checked_by_length;
        std::vector<CycleSpanCheck> failures;
        std::uint64_t two_cycles_skipped = 0;

        auto checked() const -> std::uint64_t
        {
            std::uint64_t total = 0;
            for (auto & [length, count] : checked_by_length)
                total += count;
            return total;
        }

        auto passes() const -> bool
        {
            return failures.empty();
        }
    };

    template <typename Vertex_>
    auto check_cycle_span(const UniformHypergraph<Vertex_> & h, const HypergraphCycle & cycle) -> CycleSpanCheck
    {
        CycleSpanCheck result;
        result.cycle = cycle;
        result.expected_span = (h.uniformity() - 1) * cycle.length();

        std::vector<std::uint32_t> spanned;
        for (auto e : cycle.edges)
            for (auto v : h.edge(e))
                spanned.push_back(v);
        std::sort(spanned.begin(), spanned.end());

        result.linking_degrees_ok = true;
        result.other_degrees_ok = true;
        for (std::size_t i = 0 ; i < spanned.size() ; ) {
            auto j = i;
            while (j < spanned.size() && spanned[j] == spanned[i])
                ++j;
            auto degree = j - i;
            bool linking = std::find(cycle.linking_vertices.begin(), cycle.linking_vertices.end(), spanned[i]) != cycle.linking_vertices.end();
            if (linking && degree != 2)
                result.linking_degrees_ok = false;
            if (! linking && degree != 1)
                result.other_degrees_ok = false;
            ++result.span;
            i = j;
        }
        return result;
    }

    /// Enumerates minimal cycles up to max_length and checks the span facts
    /// for every one of length at least 3. Failing checks are kept.
    template <typename Vertex_>
    auto verify_minimal_cycle_spans(const UniformHypergraph<Vertex_> & h, std::size_t max_length,
            std::uint64_t node_budget = default_cycle_budget) -> CycleSpanReport
    {
        if (max_length < 3)
            throw InvalidParameter("span check needs maximum cycle length at least 3");
        CycleSpanReport report;
        for_each_minimal_cycle(h, max_length, [&] (const HypergraphCycle & cycle) {
                if (cycle.length() == 2) {
                    ++report.two_cycles_skipped;
                    return;
                }
                ++report.checked_by_length[cycle.length()];
                auto check = check_cycle_span(h, cycle);
                if (! check.passes())
                    report.failures.push_back(std::move(check));
                }, node_budget);
        return report;
    }
}

#endif
