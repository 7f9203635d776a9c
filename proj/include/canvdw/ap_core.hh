/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_AP_CORE_HH
#define CANVDW_GUARD_AP_CORE_HH 1

#include <canvdw/errors.hh>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace canvdw
{
    using Integer = std::int64_t;

    /// The progression a, a+d, ..., a+(k-1)d. Always stored with d > 0, so
    /// each unordered k-element progression has exactly one representative.
    struct ArithmeticProgression
    {
        Integer first = 1;
        Integer difference = 1;
        unsigned length = 3;

        auto operator<=> (const ArithmeticProgression &) const = default;

        auto element(unsigned i) const -> Integer
        {
            return first + Integer(i) * difference;
        }

        auto last() const -> Integer
        {
            return element(length - 1);
        }

        auto contains(Integer x) const -> bool
        {
            return x >= first && x <= last() && (x - first) % difference == 0;
        }

        auto elements() const -> std::vector<Integer>
        {
            std::vector<Integer> result;
            result.reserve(length);
            for (unsigned i = 0 ; i < length ; ++i)
                result.push_back(element(i));
            return result;
        }
    };

    inline auto make_progression(Integer first, Integer difference, unsigned length) -> ArithmeticProgression
    {
        if (difference < 1)
            throw InvalidParameter("progression difference must be positive, got " + std::to_string(difference));
        if (length < 1)
            throw InvalidParameter("progression length must be positive");
        return ArithmeticProgression{first, difference, length};
    }

    inline auto check_progression_length(unsigned k) -> void
    {
        if (k < 3)
            throw InvalidParameter("progression length k must be at least 3, got " + std::to_string(k));
    }

    /// A finite set A of positive integers inside an ambient interval [n].
    /// Elements are kept strictly increasing, with an O(1) membership bitmap
    /// over [0, n].
    class GroundSet
    {
        private:
            std::vector<Integer> _elements;
            Integer _n = 0;
            std::vector<bool> _member;

        public:
            GroundSet() :
                _member(1, false)
            {
            }

            /// Elements must already be strictly increasing and lie in [1, n].
            GroundSet(std::vector<Integer> elements, Integer n) :
                _elements(std::move(elements)),
                _n(n)
            {
                if (n < 0)
                    throw InvalidParameter("ambient bound n must be non-negative");
                for (std::size_t i = 0 ; i < _elements.size() ; ++i) {
                    if (_elements[i] < 1 || _elements[i] > n)
                        throw InvalidParameter("element " + std::to_string(_elements[i]) + " outside [1, " + std::to_string(n) + "]");
                    if (i > 0 && _elements[i - 1] >= _elements[i])
                        throw InvalidParameter("ground set elements must be strictly increasing");
                }
                _member.assign(std::size_t(n) + 1, false);
                for (auto x : _elements)
                    _member[std::size_t(x)] = true;
            }

            /// Sorts and deduplicates. The ambient bound defaults to the
            /// largest element.
            static auto from_unsorted(std::vector<Integer> elements, std::optional<Integer> n = std::nullopt) -> GroundSet
            {
                std::sort(elements.begin(), elements.end());
                elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
                Integer bound = n ? *n : (elements.empty() ? 0 : elements.back());
                return GroundSet{std::move(elements), bound};
            }

            /// The interval [n].
            static auto interval(Integer n) -> GroundSet
            {
                std::vector<Integer> elements;
                for (Integer x = 1 ; x <= n ; ++x)
                    elements.push_back(x);
                return GroundSet{std::move(elements), std::max<Integer>(n, 0)};
            }

            auto size() const -> std::size_t
            {
                return _elements.size();
            }

            auto empty() const -> bool
            {
                return _elements.empty();
            }

            auto ambient_bound() const -> Integer
            {
                return _n;
            }

            auto elements() const -> std::span<const Integer>
            {
                return _elements;
            }

            auto operator[] (std::size_t i) const -> Integer
            {
                return _elements[i];
            }

            auto begin() const
            {
                return _elements.begin();
            }

            auto end() const
            {
                return _elements.end();
            }

            auto contains(Integer x) const -> bool
            {
                return x >= 0 && x <= _n && _member[std::size_t(x)];
            }

            auto index_of(Integer x) const -> std::optional<std::size_t>
            {
                if (! contains(x))
                    return std::nullopt;
                return std::size_t(std::lower_bound(_elements.begin(), _elements.end(), x) - _elements.begin());
            }

            auto is_subset_of(const GroundSet & other) const -> bool
            {
                return std::all_of(_elements.begin(), _elements.end(), [&] (Integer x) { return other.contains(x); });
            }

            /// Same elements; the ambient bound is not compared.
            auto same_elements(const GroundSet & other) const -> bool
            {
                return _elements == other._elements;
            }

            auto operator== (const GroundSet & other) const -> bool
            {
                return _n == other._n && _elements == other._elements;
            }
    };

    /// A k-uniform hypergraph over labelled vertices. Edges are stored as
    /// sorted vertex-index tuples in one flat array.
    template <typename Vertex_>
    class UniformHypergraph
    {
        private:
            unsigned _k;
            std::vector<Vertex_> _vertices;
            std::vector<std::uint32_t> _incidences;

        public:
            using VertexLabel = Vertex_;

            explicit UniformHypergraph(unsigned k, std::vector<Vertex_> vertices = {}) :
                _k(k),
                _vertices(std::move(vertices))
            {
                if (k < 1)
                    throw InvalidParameter("uniformity must be positive");
            }

            auto uniformity() const -> unsigned
            {
                return _k;
            }

            auto num_vertices() const -> std::size_t
            {
                return _vertices.size();
            }

            auto num_edges() const -> std::size_t
            {
                return _incidences.size() / _k;
            }

            auto vertex(std::size_t v) const -> const Vertex_ &
            {
                return _vertices[v];
            }

            auto vertices() const -> std::span<const Vertex_>
            {
                return _vertices;
            }

            auto edge(std::size_t e) const -> std::span<const std::uint32_t>
            {
                return std::span<const std::uint32_t>{_incidences}.subspan(e * _k, _k);
            }

            auto reserve_edges(std::size_t count) -> void
            {
                _incidences.reserve(count * _k);
            }

            /// Adds an edge given as k distinct vertex indices in any order.
            /// Duplicate edges are not detected here; see validate().
            auto add_edge(std::span<const std::uint32_t> members) -> std::size_t
            {
                if (members.size() != _k)
                    throw InvalidParameter("edge has " + std::to_string(members.size()) + " vertices, expected " + std::to_string(_k));
                auto start = _incidences.size();
                for (auto v : members) {
                    if (v >= _vertices.size())
                        throw InvalidParameter("edge vertex index out of range");
                    _incidences.push_back(v);
                }
                std::sort(_incidences.begin() + std::ptrdiff_t(start), _incidences.end());
                if (std::adjacent_find(_incidences.begin() + std::ptrdiff_t(start), _incidences.end()) != _incidences.end()) {
                    _incidences.resize(start);
                    throw InvalidParameter("edge vertices must be distinct");
                }
                return num_edges() - 1;
            }

            /// Checks the no-duplicate-edge invariant.
            auto has_duplicate_edges() const -> bool
            {
                std::vector<std::vector<std::uint32_t>> all;
                all.reserve(num_edges());
                for (std::size_t e = 0 ; e < num_edges() ; ++e)
                    all.emplace_back(edge(e).begin(), edge(e).end());
                std::sort(all.begin(), all.end());
                return std::adjacent_find(all.begin(), all.end()) != all.end();
            }

            /// Edges incident to each vertex, in increasing edge order.
            auto incident_edges() const -> std::vector<std::vector<std::uint32_t>>
            {
                std::vector<std::vector<std::uint32_t>> result(num_vertices());
                for (std::size_t e = 0 ; e < num_edges() ; ++e)
                    for (auto v : edge(e))
                        result[v].push_back(std::uint32_t(e));
                return result;
            }
    };

    using APHypergraph = UniformHypergraph<Integer>;

    /// Every k-AP with all elements in A, ordered lexicographically by (a, d).
    inline auto enumerate_aps(const GroundSet & set, unsigned k) -> std::vector<ArithmeticProgression>
    {
        check_progression_length(k);
        std::vector<ArithmeticProgression> result;
        if (set.empty())
            return result;

        auto top = set.elements().back();
        for (auto a : set) {
            for (Integer d = 1 ; a + Integer(k - 1) * d <= top ; ++d) {
                bool all = true;
                for (unsigned i = 1 ; i < k && all ; ++i)
                    all = set.contains(a + Integer(i) * d);
                if (all)
                    result.push_back(ArithmeticProgression{a, d, k});
            }
        }
        return result;
    }

    /// Number of k-APs inside [n], by summing n - (k-1)d over feasible d.
    inline auto count_aps_in_interval(Integer n, unsigned k) -> std::uint64_t
    {
        check_progression_length(k);
        std::uint64_t total = 0;
        for (Integer d = 1 ; Integer(k - 1) * d < n ; ++d)
            total += std::uint64_t(n - Integer(k - 1) * d);
        return total;
    }

    /// All k-APs inside [n] containing x, ordered by (a, d).
    inline auto aps_through_element(Integer x, Integer n, unsigned k) -> std::vector<ArithmeticProgression>
    {
        check_progression_length(k);
        if (x < 1 || x > n)
            throw InvalidParameter("element " + std::to_string(x) + " outside [1, " + std::to_string(n) + "]");

        std::vector<ArithmeticProgression> result;
        for (unsigned position = 0 ; position < k ; ++position)
            for (Integer d = 1 ; ; ++d) {
                auto a = x - Integer(position) * d;
                if (a < 1)
                    break;
                // the last term x + (k-1-position)d never decreases in d
                if (a + Integer(k - 1) * d > n)
                    break;
                result.push_back(ArithmeticProgression{a, d, k});
            }
        std::sort(result.begin(), result.end());
        return result;
    }

    /// All k-APs of positive integers containing both x and y, optionally
    /// restricted to [n]. Each pair of positions i < j with (j - i) dividing
    /// |y - x| gives at most one progression.
    inline auto aps_through_pair(Integer x, Integer y, unsigned k, std::optional<Integer> n = std::nullopt) -> std::vector<ArithmeticProgression>
    {
        check_progression_length(k);
        if (x == y)
            throw InvalidParameter("aps_through_pair needs two distinct integers");

        auto lo = std::min(x, y), gap = std::max(x, y) - lo;
        std::vector<ArithmeticProgression> result;
        for (unsigned i = 0 ; i < k ; ++i)
            for (unsigned j = i + 1 ; j < k ; ++j) {
                if (gap % Integer(j - i) != 0)
                    continue;
                auto d = gap / Integer(j - i);
                auto a = lo - Integer(i) * d;
                if (a < 1)
                    continue;
                ArithmeticProgression ap{a, d, k};
                if (n && ap.last() > *n)
                    continue;
                result.push_back(ap);
            }
        std::sort(result.begin(), result.end());
        return result;
    }

    /// H_kAP(A): vertices are the elements of A in order, edges the k-APs.
    inline auto build_ap_hypergraph(const GroundSet & set, unsigned k) -> APHypergraph
    {
        auto aps = enumerate_aps(set, k);
        APHypergraph result{k, std::vector<Integer>(set.begin(), set.end())};
        result.reserve_edges(aps.size());
        std::vector<std::uint32_t> members(k);
        for (auto & ap : aps) {
            for (unsigned i = 0 ; i < k ; ++i)
                members[i] = std::uint32_t(*set.index_of(ap.element(i)));
            result.add_edge(members);
        }
        return result;
    }
}

#endif
