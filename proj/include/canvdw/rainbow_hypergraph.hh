/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_RAINBOW_HYPERGRAPH_HH
#define CANVDW_GUARD_RAINBOW_HYPERGRAPH_HH 1

#include <canvdw/ap_core.hh>
#include <canvdw/colouring.hh>
#include <canvdw/errors.hh>
#include <canvdw/rational.hh>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace canvdw
{
    /// A vertex (omega, x) of the rainbow hypergraph: integer x in colour
    /// omega. Colours are 0-based.
    struct ColouredInteger
    {
        Colour colour = 0;
        Integer value = 1;

        auto operator<=> (const ColouredInteger &) const = default;
    };

    inline auto falling_factorial(std::uint64_t r, unsigned k) -> std::uint64_t
    {
        std::uint64_t result = 1;
        for (unsigned i = 0 ; i < k ; ++i)
            result *= (r >= i ? r - i : 0);
        return result;
    }

    /// R(n, k, r): vertices [r] x [n]; one edge per k-AP in [n] and per
    /// injective assignment of colours to its k terms.
    class RainbowHypergraph
    {
        private:
            Integer _n;
            unsigned _k, _r;
            UniformHypergraph<ColouredInteger> _underlying;

        public:
            RainbowHypergraph(Integer n, unsigned k, unsigned r, UniformHypergraph<ColouredInteger> underlying) :
                _n(n),
                _k(k),
                _r(r),
                _underlying(std::move(underlying))
            {
            }

            auto n() const -> Integer { return _n; }
            auto k() const -> unsigned { return _k; }
            auto r() const -> unsigned { return _r; }

            auto underlying() const -> const UniformHypergraph<ColouredInteger> &
            {
                return _underlying;
            }

            auto num_vertices() const -> std::size_t
            {
                return _underlying.num_vertices();
            }

            auto num_edges() const -> std::size_t
            {
                return _underlying.num_edges();
            }

            auto vertex_index(Colour colour, Integer x) const -> std::uint32_t
            {
                return std::uint32_t(std::size_t(colour) * std::size_t(_n) + std::size_t(x - 1));
            }
    };

    inline auto build_rainbow_hypergraph(Integer n, unsigned k, unsigned r) -> RainbowHypergraph
    {
        check_progression_length(k);
        if (r < k)
            throw InvalidParameter("rainbow hypergraph needs r >= k, got r = " + std::to_string(r) + ", k = " + std::to_string(k));
        if (n < 0)
            throw InvalidParameter("n must be non-negative");

        std::vector<ColouredInteger> vertices;
        vertices.reserve(std::size_t(r) * std::size_t(n));
        for (Colour c = 0 ; c < r ; ++c)
            for (Integer x = 1 ; x <= n ; ++x)
                vertices.push_back(ColouredInteger{c, x});

        UniformHypergraph<ColouredInteger> underlying{k, std::move(vertices)};
        auto aps = enumerate_aps(GroundSet::interval(n), k);
        underlying.reserve_edges(aps.size() * falling_factorial(r, k));

        std::vector<std::uint32_t> members(k);
        std::vector<bool> used(r, false);
        auto index = [&] (Colour c, Integer x) { return std::uint32_t(std::size_t(c) * std::size_t(n) + std::size_t(x - 1)); };

        for (auto & ap : aps) {
            auto assign = [&] (auto & self, unsigned position) -> void {
                if (position == k) {
                    underlying.add_edge(members);
                    return;
                }
                for (Colour c = 0 ; c < r ; ++c) {
                    if (used[c])
                        continue;
                    used[c] = true;
                    members[position] = index(c, ap.element(position));
                    self(self, position + 1);
                    used[c] = false;
                }
            };
            assign(assign, 0);
        }
        return RainbowHypergraph{n, k, r, std::move(underlying)};
    }

    namespace detail
    {
        template <typename Visit_>
        auto for_each_subset_of_edge(std::span<const std::uint32_t> edge, unsigned size, Visit_ && visit) -> void
        {
            std::vector<std::uint32_t> chosen;
            auto rec = [&] (auto & self, std::size_t from) -> void {
                if (chosen.size() == size) {
                    visit(std::span<const std::uint32_t>{chosen});
                    return;
                }
                for (auto i = from ; i + (size - chosen.size()) <= edge.size() ; ++i) {
                    chosen.push_back(edge[i]);
                    self(self, i + 1);
                    chosen.pop_back();
                }
            };
            rec(rec, 0);
        }

        /// Largest multiplicity in a key list.
        template <typename Key_>
        auto max_run(std::vector<Key_> & keys) -> std::uint64_t
        {
            std::sort(keys.begin(), keys.end());
            std::uint64_t best = 0;
            for (std::size_t i = 0 ; i < keys.size() ; ) {
                auto j = i;
                while (j < keys.size() && keys[j] == keys[i])
                    ++j;
                best = std::max<std::uint64_t>(best, j - i);
                i = j;
            }
            return best;
        }
    }

    inline auto check_degree_order(unsigned ell, unsigned k) -> void
    {
        if (ell < 1 || ell > k)
            throw InvalidParameter("degree order l must lie in [1, k], got " + std::to_string(ell));
    }

    /// Delta_l(H): the most edges containing any one l-set of vertices.
    /// Counts the l-subsets of every edge (e(H) * C(k, l) keys in memory).
    template <typename Vertex_>
    auto max_degree(const UniformHypergraph<Vertex_> & h, unsigned ell) -> std::uint64_t
    {
        check_degree_order(ell, h.uniformity());
        auto bits = unsigned(std::bit_width(std::max<std::size_t>(h.num_vertices(), 1)));
        if (std::size_t(bits) * ell <= 64) {
            std::vector<std::uint64_t> keys;
            for (std::size_t e = 0 ; e < h.num_edges() ; ++e)
                detail::for_each_subset_of_edge(h.edge(e), ell, [&] (std::span<const std::uint32_t> s) {
                        std::uint64_t key = 0;
                        for (auto v : s)
                            key = (key << bits) | v;
                        keys.push_back(key);
                        });
            return detail::max_run(keys);
        }

        std::vector<std::vector<std::uint32_t>> keys;
        for (std::size_t e = 0 ; e < h.num_edges() ; ++e)
            detail::for_each_subset_of_edge(h.edge(e), ell, [&] (std::span<const std::uint32_t> s) {
                    keys.emplace_back(s.begin(), s.end());
                    });
        return detail::max_run(keys);
    }

    /// Delta_l(H) with memory bounded by one vertex's incident edges: groups
    /// l-sets by their smallest vertex.
    template <typename Vertex_>
    auto max_degree_streaming(const UniformHypergraph<Vertex_> & h, unsigned ell) -> std::uint64_t
    {
        check_degree_order(ell, h.uniformity());
        auto incident = h.incident_edges();
        std::uint64_t best = 0;
        std::vector<std::vector<std::uint32_t>> keys;
        for (std::uint32_t v = 0 ; v < h.num_vertices() ; ++v) {
            keys.clear();
            for (auto e : incident[v]) {
                auto edge = h.edge(e);
                // edges are sorted, so the l-sets led by v use vertices after it
                auto at = std::size_t(std::find(edge.begin(), edge.end(), v) - edge.begin());
                if (ell == 1) {
                    keys.push_back({v});
                    continue;
                }
                detail::for_each_subset_of_edge(edge.subspan(at + 1), ell - 1, [&] (std::span<const std::uint32_t> s) {
                        keys.emplace_back(s.begin(), s.end());
                        });
            }
            best = std::max(best, detail::max_run(keys));
        }
        return best;
    }

    inline auto max_degree(const RainbowHypergraph & rainbow, unsigned ell) -> std::uint64_t
    {
        return max_degree(rainbow.underlying(), ell);
    }

    /// One row of the degree check: Delta_l against
    /// k^3 r^k n^{-(l-1)/(k-1)} e(R)/v(R).
    struct DegreeBoundRow
    {
        unsigned ell = 1;
        std::uint64_t max_degree = 0;
        double bound = 0.0;
        bool passes = false;
    };

    struct DegreeBoundReport
    {
        Integer n = 0;
        unsigned k = 3, r = 3;
        std::uint64_t edges = 0, vertices = 0;
        std::vector<DegreeBoundRow> rows;

        bool edge_lower_bound = false;     ///< e(R) >= (n/k)^2
        bool vertex_degree_bound = false;  ///< Delta_1 <= k n r^{k-1}
        bool pair_degree_bound = false;    ///< Delta_l <= k^2 r^{k-2} for l >= 2

        auto passes() const -> bool
        {
            return edge_lower_bound && vertex_degree_bound && pair_degree_bound
                && std::all_of(rows.begin(), rows.end(), [] (const DegreeBoundRow & row) { return row.passes; });
        }
    };

    /// Checks the rainbow hypergraph's degree bounds. The main inequality
    /// has an irrational right-hand side; it is decided exactly by raising
    /// both sides to the power k-1:
    ///     (Delta_l v)^{k-1} n^{l-1} <= (k^3 r^k e)^{k-1}.
    inline auto verify_degree_bounds(const RainbowHypergraph & rainbow) -> DegreeBoundReport
    {
        using boost::multiprecision::cpp_int;
        using boost::multiprecision::pow;

        DegreeBoundReport report;
        report.n = rainbow.n();
        report.k = rainbow.k();
        report.r = rainbow.r();
        report.edges = rainbow.num_edges();
        report.vertices = rainbow.num_vertices();

        auto n = rainbow.n();
        auto k = rainbow.k(), r = rainbow.r();
        cpp_int c = pow(cpp_int(k), 3) * pow(cpp_int(r), k);

        // e >= (n/k)^2  <=>  e k^2 >= n^2
        report.edge_lower_bound = cpp_int(report.edges) * k * k >= cpp_int(n) * n;
        report.vertex_degree_bound = true;
        report.pair_degree_bound = true;

        for (unsigned ell = 1 ; ell <= k ; ++ell) {
            DegreeBoundRow row;
            row.ell = ell;
            row.max_degree = max_degree(rainbow, ell);
            row.bound = double(k) * k * k * std::pow(double(r), double(k))
                * std::pow(double(n), -double(ell - 1) / double(k - 1))
                * double(report.edges) / double(std::max<std::uint64_t>(report.vertices, 1));
            cpp_int lhs = pow(cpp_int(row.max_degree) * report.vertices, k - 1) * pow(cpp_int(n), ell - 1);
            cpp_int rhs = pow(c * report.edges, k - 1);
            row.passes = lhs <= rhs;

            if (ell == 1)
                report.vertex_degree_bound = cpp_int(row.max_degree) <= cpp_int(k) * n * pow(cpp_int(r), k - 1);
            else
                report.pair_degree_bound = report.pair_degree_bound
                    && cpp_int(row.max_degree) <= cpp_int(k) * k * pow(cpp_int(r), k - 2);
            report.rows.push_back(row);
        }
        return report;
    }

    /// A set U of vertices of R(n, k, r), as membership over [r] x [n].
    class VertexSubset
    {
        private:
            Integer _n;
            unsigned _r;
            std::vector<bool> _member;
            std::size_t _size = 0;

            auto slot(Colour colour, Integer x) const -> std::size_t
            {
                if (colour >= _r || x < 1 || x > _n)
                    throw InvalidParameter("vertex (" + std::to_string(colour) + ", " + std::to_string(x) + ") outside [r] x [n]");
                return std::size_t(colour) * std::size_t(_n) + std::size_t(x - 1);
            }

        public:
            VertexSubset(Integer n, unsigned r) :
                _n(n),
                _r(r),
                _member(std::size_t(r) * std::size_t(std::max<Integer>(n, 0)), false)
            {
            }

            static auto full(Integer n, unsigned r) -> VertexSubset
            {
                VertexSubset result{n, r};
                for (Colour c = 0 ; c < r ; ++c)
                    for (Integer x = 1 ; x <= n ; ++x)
                        result.insert(c, x);
                return result;
            }

            auto n() const -> Integer { return _n; }
            auto r() const -> unsigned { return _r; }
            auto size() const -> std::size_t { return _size; }

            auto insert(Colour colour, Integer x) -> void
            {
                auto s = slot(colour, x);
                if (! _member[s]) {
                    _member[s] = true;
                    ++_size;
                }
            }

            auto contains(Colour colour, Integer x) const -> bool
            {
                if (colour >= _r || x < 1 || x > _n)
                    return false;
                return _member[std::size_t(colour) * std::size_t(_n) + std::size_t(x - 1)];
            }

            /// All members, ordered by (colour, x).
            auto members() const -> std::vector<ColouredInteger>
            {
                std::vector<ColouredInteger> result;
                for (Colour c = 0 ; c < _r ; ++c)
                    for (Integer x = 1 ; x <= _n ; ++x)
                        if (contains(c, x))
                            result.push_back(ColouredInteger{c, x});
                return result;
            }

            auto operator== (const VertexSubset &) const -> bool = default;
    };

    /// U_x: the colours in which x appears in U.
    inline auto colour_set(const VertexSubset & u, Integer x) -> std::vector<Colour>
    {
        std::vector<Colour> result;
        for (Colour c = 0 ; c < u.r() ; ++c)
            if (u.contains(c, x))
                result.push_back(c);
        return result;
    }

    /// pi_[n](U): the integers x with U_x non-empty.
    inline auto project(const VertexSubset & u) -> GroundSet
    {
        std::vector<Integer> result;
        for (Integer x = 1 ; x <= u.n() ; ++x)
            for (Colour c = 0 ; c < u.r() ; ++c)
                if (u.contains(c, x)) {
                    result.push_back(x);
                    break;
                }
        return GroundSet{std::move(result), u.n()};
    }

    /// I(Z) = {(phi(z), z) : z in Z} inside [r] x [n].
    inline auto embed_coloured_set(const Colouring & phi, Integer n, unsigned r) -> VertexSubset
    {
        if (phi.palette_size() > r)
            throw InvalidParameter("colouring uses " + std::to_string(phi.palette_size()) + " colours, more than r = " + std::to_string(r));
        VertexSubset result{n, r};
        auto & domain = phi.domain();
        for (std::size_t i = 0 ; i < domain.size() ; ++i)
            result.insert(phi.colour_at(i), domain[i]);
        return result;
    }

    inline auto embed_coloured_set(const GroundSet & z, const Colouring & phi, Integer n, unsigned r) -> VertexSubset
    {
        if (! z.same_elements(phi.domain()))
            throw InvalidParameter("colouring is not defined on exactly Z");
        return embed_coloured_set(phi, n, r);
    }

    /// e(R[U]), counted from the k-APs of pi(U): each contributes the number
    /// of ways to pick distinct colours omega_i in U_{a_i}.
    inline auto count_rainbow_edges_in(const VertexSubset & u, unsigned k) -> std::uint64_t
    {
        check_progression_length(k);
        auto support = project(u);
        std::vector<std::vector<Colour>> fibres(std::size_t(u.n()) + 1);
        for (auto x : support)
            fibres[std::size_t(x)] = colour_set(u, x);

        std::uint64_t total = 0;
        std::vector<bool> used(u.r(), false);
        for (auto & ap : enumerate_aps(support, k)) {
            auto rec = [&] (auto & self, unsigned position) -> std::uint64_t {
                if (position == k)
                    return 1;
                std::uint64_t ways = 0;
                for (auto c : fibres[std::size_t(ap.element(position))]) {
                    if (used[c])
                        continue;
                    used[c] = true;
                    ways += self(self, position + 1);
                    used[c] = false;
                }
                return ways;
            };
            total += rec(rec, 0);
        }
        return total;
    }

    /// e(R[U]) by scanning R's edge list.
    inline auto count_rainbow_edges_in(const RainbowHypergraph & rainbow, const VertexSubset & u) -> std::uint64_t
    {
        std::uint64_t total = 0;
        auto & h = rainbow.underlying();
        for (std::size_t e = 0 ; e < h.num_edges() ; ++e) {
            bool inside = true;
            for (auto v : h.edge(e)) {
                auto & vertex = h.vertex(v);
                if (! u.contains(vertex.colour, vertex.value)) {
                    inside = false;
                    break;
                }
            }
            total += inside;
        }
        return total;
    }

    inline auto is_independent(const VertexSubset & u, unsigned k) -> bool
    {
        return count_rainbow_edges_in(u, k) == 0;
    }

    /// The sets built from a vertex subset U by the container-structure
    /// argument, and whether its conclusions hold at this n.
    struct ContainerStructure
    {
        GroundSet projection;               ///< A = pi(U)
        GroundSet many_colours;             ///< D = {x in A : |U_x| >= k}
        GroundSet few_colours;              ///< A' = A \ D
        std::vector<Colour> heavy_colours;  ///< Omega
        GroundSet inside_heavy;             ///< B = {b in A' : U_b within Omega}
        std::uint64_t colour_budget = 0;    ///< M = ceil(4k / beta)
        std::uint64_t edges_in_u = 0;       ///< e(R[U])
        std::uint64_t heavy_mass = 0;       ///< |U cap (Omega x A')|

        bool projection_large = false;      ///< |A| >= 3n/4 (hypothesis)
        bool few_edges = false;             ///< e(R[U]) < eps n^2 (hypothesis)
        bool b_large = false;               ///< |B| >= n/4
        bool omega_small = false;           ///< |Omega| <= M
        bool fibres_inside = false;         ///< U_b within Omega for all b in B
        bool counting_bound = false;        ///< |Omega| beta n / 4 <= heavy_mass < n k

        auto valid() const -> bool
        {
            return b_large && omega_small && fibres_inside;
        }
    };

    /// Runs the construction unconditionally:
    ///   D     = {x in A : |U_x| >= k},  A' = A \ D,
    ///   Omega = {omega : |U cap ({omega} x A')| >= beta n / 4},
    ///   B     = {b in A' : U_b within Omega},  M = ceil(4k / beta).
    inline auto extract_container_structure(const VertexSubset & u, unsigned k, const Rational & beta, const Rational & epsilon) -> ContainerStructure
    {
        check_progression_length(k);
        if (beta <= 0)
            throw InvalidParameter("beta must be positive");
        if (epsilon <= 0)
            throw InvalidParameter("epsilon must be positive");

        ContainerStructure result;
        auto n = u.n();
        result.projection = project(u);

        std::vector<Integer> many, few;
        for (auto x : result.projection)
            (colour_set(u, x).size() >= k ? many : few).push_back(x);
        result.many_colours = GroundSet{many, n};
        result.few_colours = GroundSet{few, n};

        for (Colour c = 0 ; c < u.r() ; ++c) {
            std::int64_t count = 0;
            for (auto x : few)
                count += u.contains(c, x);
            // count >= beta n / 4  <=>  4 count >= beta n
            if (at_least_fraction_of(4 * count, beta, n))
                result.heavy_colours.push_back(c);
        }

        std::vector<bool> heavy(u.r(), false);
        for (auto c : result.heavy_colours)
            heavy[c] = true;

        std::vector<Integer> inside;
        for (auto x : few) {
            auto fibre = colour_set(u, x);
            result.heavy_mass += std::uint64_t(std::count_if(fibre.begin(), fibre.end(), [&] (Colour c) { return heavy[c]; }));
            if (std::all_of(fibre.begin(), fibre.end(), [&] (Colour c) { return heavy[c]; }))
                inside.push_back(x);
        }
        result.inside_heavy = GroundSet{inside, n};

        result.colour_budget = std::uint64_t(ceil_fraction_of(Rational(4 * std::int64_t(k)) / beta, 1));
        result.edges_in_u = count_rainbow_edges_in(u, k);

        result.projection_large = 4 * std::int64_t(result.projection.size()) >= 3 * n;
        result.few_edges = ! at_least_fraction_of(std::int64_t(result.edges_in_u), epsilon, n * n);
        result.b_large = 4 * std::int64_t(result.inside_heavy.size()) >= n;
        result.omega_small = result.heavy_colours.size() <= result.colour_budget;
        result.fibres_inside = std::all_of(result.inside_heavy.begin(), result.inside_heavy.end(), [&] (Integer b) {
                auto fibre = colour_set(u, b);
                return std::all_of(fibre.begin(), fibre.end(), [&] (Colour c) { return heavy[c]; });
                });

        // |Omega| beta n / 4 <= mass  <=>  |Omega| beta n <= 4 mass
        result.counting_bound = std::int64_t(result.heavy_colours.size()) * n * beta.numerator() <= 4 * std::int64_t(result.heavy_mass) * beta.denominator()
            && std::int64_t(result.heavy_mass) < n * std::int64_t(k);
        return result;
    }
}

#endif
