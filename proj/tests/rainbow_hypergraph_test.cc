/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#include "oracles.hh"
#include "support.hh"

#include <canvdw/rainbow_hypergraph.hh>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace canvdw;

namespace
{
    using Vertex = std::pair<unsigned, long>;   // (colour, integer)
    using Edge = std::set<Vertex>;

    /// Every rainbow k-AP of [n] with colours from [r], built directly.
    auto oracle_edges(long n, unsigned k, unsigned r) -> std::vector<Edge>
    {
        std::vector<Edge> result;
        for (auto & p : oracle::aps(oracle::interval(n), k)) {
            std::vector<unsigned> colours(k, 0);
            std::function<void (unsigned)> rec = [&] (unsigned i) {
                if (i == k) {
                    std::set<unsigned> distinct(colours.begin(), colours.end());
                    if (distinct.size() == k) {
                        Edge e;
                        for (unsigned j = 0 ; j < k ; ++j)
                            e.insert({colours[j], p[j]});
                        result.push_back(e);
                    }
                    return;
                }
                for (unsigned c = 0 ; c < r ; ++c) {
                    colours[i] = c;
                    rec(i + 1);
                }
            };
            rec(0);
        }
        return result;
    }

    /// Max over all l-subsets of the vertex set of the edges containing it.
    auto oracle_max_degree(const std::vector<Edge> & edges, long n, unsigned r, unsigned ell) -> std::uint64_t
    {
        std::vector<Vertex> all;
        for (unsigned c = 0 ; c < r ; ++c)
            for (long x = 1 ; x <= n ; ++x)
                all.push_back({c, x});
        std::uint64_t best = 0;
        std::vector<std::size_t> pick(ell);
        std::function<void (std::size_t, std::size_t)> rec = [&] (std::size_t depth, std::size_t from) {
            if (depth == ell) {
                std::uint64_t count = 0;
                for (auto & e : edges)
                    count += std::all_of(pick.begin(), pick.end(), [&] (std::size_t i) { return e.count(all[i]) > 0; });
                best = std::max(best, count);
                return;
            }
            for (std::size_t i = from ; i < all.size() ; ++i) {
                pick[depth] = i;
                rec(depth + 1, i + 1);
            }
        };
        rec(0, 0);
        return best;
    }

    auto oracle_count_inside(const std::vector<Edge> & edges, const VertexSubset & u) -> std::uint64_t
    {
        std::uint64_t count = 0;
        for (auto & e : edges)
            count += std::all_of(e.begin(), e.end(), [&] (const Vertex & v) { return u.contains(v.first, v.second); });
        return count;
    }

    auto random_vertex_subset(std::mt19937_64 & rng, Integer n, unsigned r, double p) -> VertexSubset
    {
        std::bernoulli_distribution keep{p};
        VertexSubset u{n, r};
        for (unsigned c = 0 ; c < r ; ++c)
            for (Integer x = 1 ; x <= n ; ++x)
                if (keep(rng))
                    u.insert(c, x);
        return u;
    }
}

TEST(BuildRainbowHypergraph, Examples)
{
    auto nine = build_rainbow_hypergraph(9, 3, 3);
    EXPECT_EQ(nine.num_vertices(), 27u);
    EXPECT_EQ(nine.num_edges(), 96u);

    auto three = build_rainbow_hypergraph(3, 3, 3);
    EXPECT_EQ(three.num_vertices(), 9u);
    EXPECT_EQ(three.num_edges(), 6u);

    EXPECT_THROW(build_rainbow_hypergraph(9, 3, 2), InvalidParameter);
    EXPECT_THROW(build_rainbow_hypergraph(9, 2, 3), InvalidParameter);
}

TEST(BuildRainbowHypergraph, EdgesMatchOracle)
{
    for (long n = 1 ; n <= 12 ; ++n)
        for (unsigned r : {3u, 4u, 5u}) {
            auto rainbow = build_rainbow_hypergraph(n, 3, r);
            auto want = oracle_edges(n, 3, r);
            ASSERT_EQ(rainbow.num_edges(), want.size());
            EXPECT_EQ(rainbow.num_edges(), count_aps_in_interval(n, 3) * falling_factorial(r, 3));
            EXPECT_EQ(rainbow.num_vertices(), std::size_t(r) * std::size_t(n));
            auto & h = rainbow.underlying();
            std::set<Edge> got;
            for (std::size_t e = 0 ; e < h.num_edges() ; ++e) {
                Edge edge;
                for (auto v : h.edge(e))
                    edge.insert({h.vertex(v).colour, h.vertex(v).value});
                got.insert(edge);
            }
            EXPECT_EQ(got, std::set<Edge>(want.begin(), want.end()));
            for (unsigned c = 0 ; c < r ; ++c)
                for (Integer x = 1 ; x <= n ; ++x)
                    EXPECT_EQ(h.vertex(rainbow.vertex_index(c, x)), (ColouredInteger{c, x}));
            if (n >= 3) {
                EXPECT_GE(double(rainbow.num_edges()), (double(n) / 3) * (double(n) / 3));
            }
        }
}

TEST(MaxDegree, Examples)
{
    auto nine = build_rainbow_hypergraph(9, 3, 3);
    auto edges = oracle_edges(9, 3, 3);
    EXPECT_EQ(max_degree(nine, 3), 1u);
    EXPECT_LE(max_degree(nine, 1), 243u);
    EXPECT_LE(max_degree(nine, 2), 27u);
    for (unsigned ell = 1 ; ell <= 3 ; ++ell) {
        EXPECT_EQ(max_degree(nine, ell), oracle_max_degree(edges, 9, 3, ell));
        EXPECT_EQ(max_degree_streaming(nine.underlying(), ell), max_degree(nine, ell));
    }
    EXPECT_THROW(max_degree(nine, 0), InvalidParameter);
    EXPECT_THROW(max_degree(nine, 4), InvalidParameter);
}

TEST(MaxDegree, StreamingAgreesWithHashing)
{
    for (auto [n, k, r] : std::vector<std::tuple<Integer, unsigned, unsigned>>{{7, 3, 4}, {20, 3, 3}, {15, 4, 4}, {12, 4, 5}}) {
        auto rainbow = build_rainbow_hypergraph(n, k, r);
        for (unsigned ell = 1 ; ell <= k ; ++ell)
            EXPECT_EQ(max_degree(rainbow, ell), max_degree_streaming(rainbow.underlying(), ell)) << n << " " << k << " " << r << " " << ell;
    }
    auto small = build_rainbow_hypergraph(7, 3, 4);
    auto edges = oracle_edges(7, 3, 4);
    for (unsigned ell = 1 ; ell <= 2 ; ++ell)
        EXPECT_EQ(max_degree(small, ell), oracle_max_degree(edges, 7, 4, ell));
}

TEST(VerifyDegreeBounds, SmallGrid)
{
    for (Integer n : {3, 9, 10, 25, 40})
        for (unsigned k : {3u, 4u})
            for (unsigned r = k ; r <= k + 2 ; ++r) {
                if (n < Integer(k))
                    continue;
                auto report = verify_degree_bounds(build_rainbow_hypergraph(n, k, r));
                EXPECT_TRUE(report.passes()) << n << " " << k << " " << r;
                ASSERT_EQ(report.rows.size(), k);
                for (auto & row : report.rows) {
                    double c = std::pow(double(k), 3) * std::pow(double(r), double(k));
                    double bound = c * std::pow(double(n), -double(row.ell - 1) / double(k - 1)) * double(report.edges) / double(report.vertices);
                    EXPECT_NEAR(row.bound, bound, 1e-9 * bound);
                    EXPECT_LE(double(row.max_degree), bound);
                }
            }
}

TEST(Projection, Examples)
{
    VertexSubset empty{9, 3};
    EXPECT_TRUE(project(empty).empty());
    for (Integer x = 1 ; x <= 9 ; ++x)
        EXPECT_TRUE(colour_set(empty, x).empty());

    VertexSubset u{9, 3};
    u.insert(1, 5);
    u.insert(2, 5);
    u.insert(1, 7);
    auto a = project(u);
    EXPECT_EQ(std::vector<Integer>(a.begin(), a.end()), (std::vector<Integer>{5, 7}));
    EXPECT_EQ(colour_set(u, 5), (std::vector<Colour>{1, 2}));
    EXPECT_EQ(colour_set(u, 7), (std::vector<Colour>{1}));

    auto full = VertexSubset::full(9, 3);
    EXPECT_EQ(project(full), GroundSet::interval(9));
    for (Integer x = 1 ; x <= 9 ; ++x)
        EXPECT_EQ(colour_set(full, x), (std::vector<Colour>{0, 1, 2}));

    EXPECT_THROW(u.insert(3, 1), InvalidParameter);
    EXPECT_THROW(u.insert(0, 10), InvalidParameter);
}

TEST(EmbedColouredSet, Examples)
{
    auto z = GroundSet::interval(3);
    auto neither = embed_coloured_set(z, Colouring{z, {0, 0, 1}}, 3, 3);
    EXPECT_EQ(neither.members(), (std::vector<ColouredInteger>{{0, 1}, {0, 2}, {1, 3}}));
    EXPECT_TRUE(is_independent(neither, 3));
    EXPECT_EQ(count_rainbow_edges_in(build_rainbow_hypergraph(3, 3, 3), neither), 0u);

    auto rainbow = embed_coloured_set(z, Colouring{z, {0, 1, 2}}, 3, 3);
    EXPECT_FALSE(is_independent(rainbow, 3));
    EXPECT_EQ(count_rainbow_edges_in(rainbow, 3), 1u);

    EXPECT_THROW(embed_coloured_set(z, Colouring{z, {0, 1, 2}}, 3, 2), InvalidParameter);
}

TEST(EmbedColouredSet, IndependentIffNoRainbowAp)
{
    std::mt19937_64 rng{41};
    for (int round = 0 ; round < 300 ; ++round) {
        auto s = testing_support::random_subset(rng, 16, 0.7);
        auto z = testing_support::to_ground_set(s, 16);
        auto phi = testing_support::random_bounded_colouring(rng, z, z.size(), 4);
        auto u = embed_coloured_set(z, phi, 16, unsigned(std::max<std::size_t>(phi.palette_size(), 3)));
        EXPECT_EQ(project(u), z);
        EXPECT_EQ(u.size(), z.size());
        EXPECT_EQ(is_independent(u, 3), count_coloured_aps(z, phi, 3).rainbow == 0);
        EXPECT_EQ(count_rainbow_edges_in(u, 3), count_coloured_aps(z, phi, 3).rainbow);
    }
}

TEST(CountRainbowEdgesIn, RoutesAgreeWithOracle)
{
    EXPECT_EQ(count_rainbow_edges_in(VertexSubset::full(9, 3), 3), 96u);
    auto rainbow = build_rainbow_hypergraph(9, 3, 3);
    EXPECT_EQ(count_rainbow_edges_in(rainbow, VertexSubset::full(9, 3)), 96u);

    std::mt19937_64 rng{42};
    for (auto [n, r] : std::vector<std::pair<Integer, unsigned>>{{9, 3}, {12, 4}, {10, 5}}) {
        auto h = build_rainbow_hypergraph(n, 3, r);
        auto edges = oracle_edges(n, 3, r);
        for (int round = 0 ; round < 60 ; ++round) {
            auto u = random_vertex_subset(rng, n, r, 0.2 + 0.01 * round);
            auto want = oracle_count_inside(edges, u);
            EXPECT_EQ(count_rainbow_edges_in(u, 3), want);
            EXPECT_EQ(count_rainbow_edges_in(h, u), want);

            auto bigger = u;
            bigger.insert(Colour(round % int(r)), 1 + round % n);
            EXPECT_LE(count_rainbow_edges_in(u, 3), count_rainbow_edges_in(bigger, 3));
        }
    }
}

TEST(ExtractContainerStructure, Examples)
{
    auto none = extract_container_structure(VertexSubset{20, 5}, 3, Rational{1, 4}, Rational{1, 10});
    EXPECT_TRUE(none.projection.empty());
    EXPECT_TRUE(none.inside_heavy.empty());
    EXPECT_TRUE(none.heavy_colours.empty());
    EXPECT_TRUE(none.omega_small);
    EXPECT_TRUE(none.fibres_inside);
    EXPECT_FALSE(none.b_large);
    EXPECT_FALSE(none.valid());

    VertexSubset slab{20, 5};
    for (Integer x = 1 ; x <= 20 ; ++x)
        slab.insert(2, x);
    auto s = extract_container_structure(slab, 3, Rational{1, 4}, Rational{1, 10});
    EXPECT_EQ(s.projection, GroundSet::interval(20));
    EXPECT_TRUE(s.many_colours.empty());
    EXPECT_EQ(s.heavy_colours, (std::vector<Colour>{2}));
    EXPECT_EQ(s.inside_heavy, GroundSet::interval(20));
    EXPECT_EQ(s.colour_budget, 48u);
    EXPECT_TRUE(s.b_large && s.omega_small && s.fibres_inside && s.counting_bound && s.valid());

    EXPECT_THROW(extract_container_structure(slab, 3, Rational{0}, Rational{1, 10}), InvalidParameter);
    EXPECT_THROW(extract_container_structure(slab, 3, Rational{1, 4}, Rational{0}), InvalidParameter);
}

TEST(ExtractContainerStructure, MatchesDirectConstruction)
{
    std::mt19937_64 rng{43};
    for (int round = 0 ; round < 200 ; ++round) {
        Integer n = round % 2 ? 30 : 17;
        unsigned r = round % 3 ? 5 : 8;
        Rational beta = round % 4 < 2 ? Rational{1, 4} : Rational{1, 8};
        auto u = random_vertex_subset(rng, n, r, 0.05 + 0.004 * (round % 100));
        auto got = extract_container_structure(u, 3, beta, Rational{1, 100});

        std::vector<Integer> many, few;
        std::map<Integer, std::vector<Colour>> fibre;
        for (Integer x = 1 ; x <= n ; ++x) {
            for (unsigned c = 0 ; c < r ; ++c)
                if (u.contains(c, x))
                    fibre[x].push_back(c);
            if (fibre[x].size() >= 3)
                many.push_back(x);
            else if (! fibre[x].empty())
                few.push_back(x);
        }
        std::vector<Colour> omega;
        for (unsigned c = 0 ; c < r ; ++c) {
            long count = 0;
            for (auto x : few)
                count += u.contains(c, x);
            if (Rational(count) >= beta * n / 4)
                omega.push_back(c);
        }
        std::vector<Integer> inside;
        for (auto x : few)
            if (std::all_of(fibre[x].begin(), fibre[x].end(), [&] (Colour c) { return std::count(omega.begin(), omega.end(), c); }))
                inside.push_back(x);

        EXPECT_EQ(std::vector<Integer>(got.many_colours.begin(), got.many_colours.end()), many);
        EXPECT_EQ(std::vector<Integer>(got.few_colours.begin(), got.few_colours.end()), few);
        EXPECT_EQ(got.heavy_colours, omega);
        EXPECT_EQ(std::vector<Integer>(got.inside_heavy.begin(), got.inside_heavy.end()), inside);
        EXPECT_TRUE(got.fibres_inside);
        EXPECT_TRUE(got.omega_small);
        EXPECT_TRUE(got.counting_bound);
        EXPECT_LT(Rational(std::int64_t(got.heavy_colours.size())), Rational(4 * 3) / beta);
        EXPECT_EQ(got.b_large, 4 * Integer(inside.size()) >= n);
    }
}
