/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_DETAIL_PARTITION_SEARCH_HH
#define CANVDW_GUARD_DETAIL_PARTITION_SEARCH_HH 1

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace canvdw
{
    /// How the partition search picks its next element.
    enum class VariableOrder
    {
        increasing,     ///< element order; values form a restricted-growth string
        smallest_domain ///< fewest admissible colours first, ties to higher AP degree
    };
}

namespace canvdw::detail
{
    inline constexpr std::uint32_t uncoloured = std::numeric_limits<std::uint32_t>::max();

    struct PartitionRules
    {
        bool forbid_monochromatic = false;
        bool forbid_rainbow = false;
        std::size_t palette_cap = std::numeric_limits<std::size_t>::max();
        std::size_t class_cap = std::numeric_limits<std::size_t>::max();
    };

    enum class PartitionOutcome
    {
        found,
        exhausted,
        budget_exhausted
    };

    /// Backtracking over set partitions of m vertices, subject to per-edge
    /// colour patterns. Colours are opened one at a time (a vertex may take
    /// any open colour or the next fresh one), so every partition is visited
    /// once regardless of variable order.
    ///
    /// Forward checking: once an edge has a single uncoloured vertex y, the
    /// pattern the edge must avoid turns into a constraint on y (forbid the
    /// colour when the rest are equal and monochromatic edges are forbidden;
    /// restrict y to the rest's colours when they are distinct and rainbow
    /// edges are forbidden). Constraints are counted per (vertex, colour), so
    /// undo is the same update with the opposite sign.
    class PartitionSearch
    {
        private:
            enum class Constraint : std::uint8_t { none, forbid, restrict };

            std::size_t _m;
            unsigned _k;
            std::vector<std::uint32_t> _edges;
            PartitionRules _rules;
            VariableOrder _order;
            std::uint64_t & _nodes;
            std::uint64_t _budget;

            std::size_t _palette;
            std::vector<std::vector<std::uint32_t>> _incident;
            std::vector<std::uint32_t> _colour;
            std::vector<std::uint32_t> _class_count;
            std::uint32_t _used = 0;

            std::vector<std::uint32_t> _uncoloured_in_edge;
            std::vector<std::uint32_t> _target;
            std::vector<Constraint> _constraint;
            std::vector<std::uint32_t> _constraint_colours;

            std::vector<std::int32_t> _forbidden;
            std::vector<std::int32_t> _included;
            std::vector<std::int32_t> _restrictions;

            bool _out_of_budget = false;

            auto cell(std::uint32_t v, std::uint32_t c) const -> std::size_t
            {
                return std::size_t(v) * _palette + c;
            }

            auto apply(std::uint32_t e, std::uint32_t y, std::int32_t sign) -> void
            {
                switch (_constraint[e]) {
                    case Constraint::none:
                        break;
                    case Constraint::forbid:
                        _forbidden[cell(y, _constraint_colours[e * _k])] += sign;
                        break;
                    case Constraint::restrict:
                        _restrictions[y] += sign;
                        for (unsigned i = 0 ; i + 1 < _k ; ++i)
                            _included[cell(y, _constraint_colours[e * _k + i])] += sign;
                        break;
                }
            }

            auto derive_constraint(std::uint32_t e) -> void
            {
                auto members = std::span<const std::uint32_t>{_edges}.subspan(std::size_t(e) * _k, _k);
                std::uint32_t * colours = &_constraint_colours[std::size_t(e) * _k];
                unsigned count = 0;
                for (auto u : members)
                    if (_colour[u] != uncoloured)
                        colours[count++] = _colour[u];
                    else
                        _target[e] = u;

                bool all_equal = true, all_distinct = true;
                for (unsigned i = 0 ; i < count ; ++i)
                    for (unsigned j = i + 1 ; j < count ; ++j) {
                        if (colours[i] == colours[j])
                            all_distinct = false;
                        else
                            all_equal = false;
                    }

                if (all_equal && _rules.forbid_monochromatic)
                    _constraint[e] = Constraint::forbid;
                else if (all_distinct && _rules.forbid_rainbow)
                    _constraint[e] = Constraint::restrict;
                else
                    _constraint[e] = Constraint::none;
            }

            auto admissible(std::uint32_t v, std::uint32_t c) const -> bool
            {
                if (c == _used)
                    return _restrictions[v] == 0 && _used < _palette && _rules.class_cap > 0;
                return _forbidden[cell(v, c)] == 0
                    && _included[cell(v, c)] == _restrictions[v]
                    && _class_count[c] < _rules.class_cap;
            }

            auto domain_size(std::uint32_t v, std::uint32_t stop_at) const -> std::uint32_t
            {
                std::uint32_t result = 0;
                for (std::uint32_t c = 0 ; c <= _used && result < stop_at ; ++c)
                    if (admissible(v, c))
                        ++result;
                return result;
            }

            auto assign(std::uint32_t v, std::uint32_t c) -> bool
            {
                _colour[v] = c;
                if (c == _used)
                    ++_used;
                ++_class_count[c];

                for (auto e : _incident[v]) {
                    auto left = --_uncoloured_in_edge[e];
                    if (left == 1) {
                        derive_constraint(e);
                        apply(e, _target[e], +1);
                    }
                    else if (left == 0)
                        apply(e, v, -1);
                }

                for (auto e : _incident[v])
                    if (_uncoloured_in_edge[e] == 1 && domain_size(_target[e], 1) == 0)
                        return false;
                return true;
            }

            auto unassign(std::uint32_t v) -> void
            {
                for (auto e : _incident[v]) {
                    auto left = _uncoloured_in_edge[e]++;
                    if (left == 0)
                        apply(e, v, +1);
                    else if (left == 1)
                        apply(e, _target[e], -1);
                }

                auto c = _colour[v];
                _colour[v] = uncoloured;
                if (--_class_count[c] == 0 && c + 1 == _used)
                    --_used;
            }

            auto select(std::size_t depth) const -> std::uint32_t
            {
                if (_order == VariableOrder::increasing)
                    return std::uint32_t(depth);

                std::uint32_t best = uncoloured, best_size = 0;
                for (std::uint32_t v = 0 ; v < _m ; ++v) {
                    if (_colour[v] != uncoloured)
                        continue;
                    auto size = domain_size(v, best == uncoloured ? std::numeric_limits<std::uint32_t>::max() : best_size + 1);
                    if (best == uncoloured || size < best_size
                            || (size == best_size && _incident[v].size() > _incident[best].size())) {
                        best = v;
                        best_size = size;
                        if (size <= 1)
                            break;
                    }
                }
                return best;
            }

            auto search(std::size_t depth) -> bool
            {
                if (depth == _m)
                    return true;
                if (++_nodes > _budget) {
                    _out_of_budget = true;
                    return false;
                }

                auto v = select(depth);
                auto open = _used;
                for (std::uint32_t c = 0 ; c <= open ; ++c) {
                    if (! admissible(v, c))
                        continue;
                    if (assign(v, c) && search(depth + 1))
                        return true;
                    unassign(v);
                    if (_out_of_budget)
                        return false;
                }
                return false;
            }

        public:
            /// Vertices are 0..m-1, edges a flat list of k-tuples. Under
            /// VariableOrder::increasing vertices are coloured in index order.
            PartitionSearch(std::size_t m, unsigned k, std::vector<std::uint32_t> edges, PartitionRules rules,
                    VariableOrder order, std::uint64_t & nodes, std::uint64_t budget) :
                _m(m),
                _k(k),
                _edges(std::move(edges)),
                _rules(rules),
                _order(order),
                _nodes(nodes),
                _budget(budget),
                _palette(std::max<std::size_t>(1, std::min(rules.palette_cap, m))),
                _incident(m),
                _colour(m, uncoloured),
                _class_count(_palette + 1, 0)
            {
                auto num_edges = _edges.size() / k;
                for (std::size_t e = 0 ; e < num_edges ; ++e)
                    for (unsigned i = 0 ; i < k ; ++i)
                        _incident[_edges[e * k + i]].push_back(std::uint32_t(e));
                _uncoloured_in_edge.assign(num_edges, k);
                _target.assign(num_edges, uncoloured);
                _constraint.assign(num_edges, Constraint::none);
                _constraint_colours.assign(num_edges * k, 0);
                _forbidden.assign(m * _palette + 1, 0);
                _included.assign(m * _palette + 1, 0);
                _restrictions.assign(m, 0);
            }

            auto run() -> PartitionOutcome
            {
                if (_m > 0 && _palette * std::min<std::size_t>(_rules.class_cap, _m) < _m)
                    return PartitionOutcome::exhausted;
                if (search(0))
                    return PartitionOutcome::found;
                return _out_of_budget ? PartitionOutcome::budget_exhausted : PartitionOutcome::exhausted;
            }

            /// Colour of each vertex after a successful run.
            auto colours() const -> const std::vector<std::uint32_t> &
            {
                return _colour;
            }
    };
}

#endif
