/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_TESTS_SUPPORT_HH
#define CANVDW_GUARD_TESTS_SUPPORT_HH 1

#include "oracles.hh"

#include <canvdw/ap_core.hh>
#include <canvdw/colouring.hh>
#include <canvdw/hypergraph_cycles.hh>

#include <random>
#include <vector>

namespace testing_support
{
    inline auto to_ground_set(const oracle::Set & s, canvdw::Integer n) -> canvdw::GroundSet
    {
        return canvdw::GroundSet{std::vector<canvdw::Integer>(s.begin(), s.end()), n};
    }

    inline auto to_oracle(const canvdw::GroundSet & s) -> oracle::Set
    {
        return oracle::Set(s.begin(), s.end());
    }

    inline auto random_subset(std::mt19937_64 & rng, long n, double p = 0.5) -> oracle::Set
    {
        std::bernoulli_distribution keep{p};
        oracle::Set s;
        for (long x = 1 ; x <= n ; ++x)
            if (keep(rng))
                s.push_back(x);
        return s;
    }

    /// Random k-uniform hypergraph with distinct edges on `vertices` vertices.
    inline auto random_hypergraph(std::mt19937_64 & rng, unsigned vertices, unsigned k, std::size_t edges) -> oracle::Edges
    {
        std::vector<unsigned> pool(vertices);
        for (unsigned v = 0 ; v < vertices ; ++v)
            pool[v] = v;
        std::set<std::vector<unsigned>> seen;
        oracle::Edges result;
        for (std::size_t attempt = 0 ; result.size() < edges && attempt < 100 * edges ; ++attempt) {
            std::shuffle(pool.begin(), pool.end(), rng);
            std::vector<unsigned> e(pool.begin(), pool.begin() + k);
            std::sort(e.begin(), e.end());
            if (seen.insert(e).second)
                result.push_back(e);
        }
        return result;
    }

    inline auto to_hypergraph(const oracle::Edges & edges, unsigned vertices, unsigned k) -> canvdw::UniformHypergraph<unsigned>
    {
        std::vector<unsigned> labels(vertices);
        for (unsigned v = 0 ; v < vertices ; ++v)
            labels[v] = v;
        canvdw::UniformHypergraph<unsigned> h{k, labels};
        for (auto & e : edges) {
            std::vector<std::uint32_t> members(e.begin(), e.end());
            h.add_edge(members);
        }
        return h;
    }

    inline auto to_oracle_cycle(const canvdw::HypergraphCycle & c) -> oracle::Cycle
    {
        return oracle::Cycle{std::vector<std::size_t>(c.edges.begin(), c.edges.end()),
            std::vector<unsigned>(c.linking_vertices.begin(), c.linking_vertices.end())};
    }

    /// Uniform random restricted-growth colouring with every class at most
    /// `cap` elements: random labels, then repaired by moving overflow into
    /// fresh classes.
    inline auto random_bounded_colouring(std::mt19937_64 & rng, const canvdw::GroundSet & domain, std::size_t cap,
            unsigned max_colours) -> canvdw::Colouring
    {
        std::uniform_int_distribution<unsigned> pick{0, max_colours - 1};
        std::vector<unsigned> labels(domain.size());
        std::map<unsigned, std::size_t> sizes;
        unsigned fresh = max_colours;
        for (auto & l : labels) {
            l = pick(rng);
            if (++sizes[l] > cap) {
                --sizes[l];
                l = fresh++;
                ++sizes[l];
            }
        }
        return canvdw::normalize(domain, labels);
    }
}

#endif
