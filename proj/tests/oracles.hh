/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_TESTS_ORACLES_HH
#define CANVDW_GUARD_TESTS_ORACLES_HH 1

// Brute-force reference implementations. Nothing here calls into the
// library's search code; sets are plain sorted vectors of integers and
// colourings plain vectors of colour indices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace oracle
{
    using Set = std::vector<long>;
    using Colours = std::vector<unsigned>;
    using AP = std::vector<long>;

    inline auto contains(const Set & s, long x) -> bool
    {
        return std::binary_search(s.begin(), s.end(), x);
    }

    /// Every (a, d) with d >= 1 whose k terms all lie in s.
    inline auto aps(const Set & s, unsigned k) -> std::vector<AP>
    {
        std::vector<AP> result;
        if (s.empty())
            return result;
        long top = s.back();
        for (long a = 1 ; a <= top ; ++a)
            for (long d = 1 ; a + long(k - 1) * d <= top ; ++d) {
                AP p;
                for (unsigned i = 0 ; i < k ; ++i)
                    p.push_back(a + long(i) * d);
                if (std::all_of(p.begin(), p.end(), [&] (long x) { return contains(s, x); }))
                    result.push_back(p);
            }
        return result;
    }

    inline auto interval(long n) -> Set
    {
        Set s;
        for (long x = 1 ; x <= n ; ++x)
            s.push_back(x);
        return s;
    }

    /// Colour-index form of each AP's terms (positions within s).
    inline auto ap_positions(const Set & s, unsigned k) -> std::vector<std::vector<std::size_t>>
    {
        std::vector<std::vector<std::size_t>> result;
        for (auto & p : aps(s, k)) {
            std::vector<std::size_t> pos;
            for (auto x : p)
                pos.push_back(std::size_t(std::lower_bound(s.begin(), s.end(), x) - s.begin()));
            result.push_back(pos);
        }
        return result;
    }

    struct Counts
    {
        std::uint64_t mono = 0, rainbow = 0, neither = 0;
    };

    inline auto classify(const std::vector<std::vector<std::size_t>> & positions, const Colours & c) -> Counts
    {
        Counts counts;
        for (auto & p : positions) {
            std::set<unsigned> seen;
            for (auto i : p)
                seen.insert(c[i]);
            if (seen.size() == 1)
                ++counts.mono;
            else if (seen.size() == p.size())
                ++counts.rainbow;
            else
                ++counts.neither;
        }
        return counts;
    }

    /// Calls f on every restricted-growth string of length m.
    inline auto for_each_partition(std::size_t m, const std::function<void (const Colours &)> & f) -> void
    {
        Colours c(m, 0);
        std::function<void (std::size_t, unsigned)> rec = [&] (std::size_t i, unsigned top) {
            if (i == m) {
                f(c);
                return;
            }
            for (unsigned v = 0 ; v <= top ; ++v) {
                c[i] = v;
                rec(i + 1, std::max(top, v + 1));
            }
        };
        if (m == 0)
            f(c);
        else
            rec(1, 1);
    }

    inline auto palette(const Colours & c) -> unsigned
    {
        return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
    }

    inline auto largest_class(const Colours & c) -> std::size_t
    {
        std::map<unsigned, std::size_t> sizes;
        for (auto x : c)
            ++sizes[x];
        std::size_t best = 0;
        for (auto & [colour, size] : sizes)
            best = std::max(best, size);
        return best;
    }

    /// Verdicts for every colouring property on one set, from a single
    /// sweep over all partitions. Alpha values are num/den pairs.
    struct Verdicts
    {
        bool canvdw = true;
        std::map<unsigned, bool> rkvdw;
        std::map<std::pair<long, long>, bool> alpharb;
    };

    inline auto all_verdicts(const Set & s, unsigned k, const std::vector<unsigned> & rs,
            const std::vector<std::pair<long, long>> & alphas) -> Verdicts
    {
        Verdicts v;
        for (auto r : rs)
            v.rkvdw[r] = true;
        for (auto a : alphas)
            v.alpharb[a] = true;
        auto positions = ap_positions(s, k);
        for_each_partition(s.size(), [&] (const Colours & c) {
                auto counts = classify(positions, c);
                if (counts.mono == 0 && counts.rainbow == 0)
                    v.canvdw = false;
                if (counts.mono == 0)
                    for (auto r : rs)
                        if (palette(c) <= r)
                            v.rkvdw[r] = false;
                if (counts.rainbow == 0) {
                    auto big = long(largest_class(c));
                    for (auto [num, den] : alphas)
                        if (big * den <= num * long(s.size()))
                            v.alpharb[{num, den}] = false;
                }
                });
        return v;
    }

    /// Largest AP-free subset size over all 2^|s| subsets.
    inline auto max_ap_free_size(const Set & s, unsigned k) -> std::size_t
    {
        auto positions = ap_positions(s, k);
        std::size_t best = 0;
        for (std::uint64_t mask = 0 ; mask < (std::uint64_t(1) << s.size()) ; ++mask) {
            auto size = std::size_t(__builtin_popcountll(mask));
            if (size <= best)
                continue;
            bool free = std::none_of(positions.begin(), positions.end(), [&] (const std::vector<std::size_t> & p) {
                    return std::all_of(p.begin(), p.end(), [&] (std::size_t i) { return (mask >> i) & 1; });
                    });
            if (free)
                best = size;
        }
        return best;
    }

    /// A k-uniform hypergraph as plain sorted vertex lists.
    using Edges = std::vector<std::vector<unsigned>>;

    struct Cycle
    {
        std::vector<std::size_t> edges;
        std::vector<unsigned> links;

        auto operator<=> (const Cycle &) const = default;
    };

    inline auto in_edge(const Edges & h, std::size_t e, unsigned v) -> bool
    {
        return std::find(h[e].begin(), h[e].end(), v) != h[e].end();
    }

    /// Rotation putting the smallest edge first, then the reflection with
    /// the smaller second edge (for length 2, the smaller first link).
    inline auto canonical(Cycle c) -> Cycle
    {
        auto l = c.edges.size();
        auto first = std::size_t(std::min_element(c.edges.begin(), c.edges.end()) - c.edges.begin());
        Cycle r;
        for (std::size_t i = 0 ; i < l ; ++i) {
            r.edges.push_back(c.edges[(first + i) % l]);
            r.links.push_back(c.links[(first + i) % l]);
        }
        Cycle reflected;
        reflected.edges.push_back(r.edges[0]);
        for (std::size_t i = l - 1 ; i >= 1 ; --i)
            reflected.edges.push_back(r.edges[i]);
        for (std::size_t i = l ; i >= 1 ; --i)
            reflected.links.push_back(r.links[i - 1]);
        return std::min(r, reflected);
    }

    /// Every cycle of length 2..max_length, canonical and deduplicated:
    /// distinct edges e_1..e_l and distinct vertices v_1..v_l with v_i in
    /// e_i and e_{i+1}, cyclically.
    inline auto all_cycles(const Edges & h, std::size_t max_length) -> std::set<Cycle>
    {
        std::set<Cycle> result;
        Cycle c;
        std::function<void ()> rec = [&] {
            auto l = c.edges.size();
            if (l >= 2)
                for (auto w : h[c.edges.back()])
                    if (in_edge(h, c.edges.front(), w) && std::find(c.links.begin(), c.links.end(), w) == c.links.end()) {
                        auto closed = c;
                        closed.links.push_back(w);
                        result.insert(canonical(closed));
                    }
            if (l == max_length)
                return;
            for (auto v : h[c.edges.back()]) {
                if (std::find(c.links.begin(), c.links.end(), v) != c.links.end())
                    continue;
                for (std::size_t f = 0 ; f < h.size() ; ++f) {
                    if (std::find(c.edges.begin(), c.edges.end(), f) != c.edges.end() || ! in_edge(h, f, v))
                        continue;
                    c.edges.push_back(f);
                    c.links.push_back(v);
                    rec();
                    c.links.pop_back();
                    c.edges.pop_back();
                }
            }
        };
        for (std::size_t e = 0 ; e < h.size() ; ++e) {
            c.edges.assign(1, e);
            c.links.clear();
            rec();
        }
        return result;
    }

    /// Cycles with no shorter cycle on a subset of their edges.
    inline auto minimal_cycles(const Edges & h, std::size_t max_length) -> std::set<Cycle>
    {
        auto all = all_cycles(h, max_length);
        std::set<Cycle> result;
        for (auto & c : all) {
            std::set<std::size_t> own(c.edges.begin(), c.edges.end());
            bool minimal = std::none_of(all.begin(), all.end(), [&] (const Cycle & d) {
                    return d.edges.size() < c.edges.size()
                        && std::all_of(d.edges.begin(), d.edges.end(), [&] (std::size_t e) { return own.count(e); });
                    });
            if (minimal)
                result.insert(c);
        }
        return result;
    }

    /// Shortest cycle length, or nullopt. Cycles longer than the number of
    /// edges cannot exist.
    inline auto girth(const Edges & h) -> std::optional<std::size_t>
    {
        for (std::size_t l = 2 ; l <= h.size() ; ++l) {
            auto cycles = all_cycles(h, l);
            for (auto & c : cycles)
                if (c.edges.size() == l)
                    return l;
        }
        return std::nullopt;
    }

    /// P(Bin(n, p) >= m), summed exactly in doubles.
    inline auto binomial_upper_tail(long n, double p, long m) -> double
    {
        double total = 0.0;
        for (long j = std::max(m, 0L) ; j <= n ; ++j)
            total += std::exp(std::lgamma(double(n + 1)) - std::lgamma(double(j + 1)) - std::lgamma(double(n - j + 1))
                    + double(j) * std::log(p) + double(n - j) * std::log1p(-p));
        return total;
    }
}

#endif
