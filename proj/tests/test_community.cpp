#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "comseq/community.hpp"
#include "comseq/network.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace comseq;

namespace {

GlobalWeightedNetwork two_triangles() {
    NetworkBuilder b;
    b.edge(1, "a", "b").edge(1, "b", "c").edge(1, "a", "c");
    b.edge(1, "d", "e").edge(1, "e", "f").edge(1, "d", "f");
    return aggregate(b.build());
}

// two 5-cliques joined by a single bridge edge c0-d0
GlobalWeightedNetwork cliques_with_bridge() {
    NetworkBuilder b;
    std::vector<std::string> left, right;
    for (int i = 0; i < 5; ++i) {
        left.push_back("c" + std::to_string(i));
        right.push_back("d" + std::to_string(i));
    }
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            b.edge(1, left[i], left[j]);
            b.edge(1, right[i], right[j]);
        }
    b.edge(1, left[0], right[0]);
    return aggregate(b.build());
}

}  // namespace

TEST_CASE("from_assignment compacts arbitrary ids and counts sizes") {
    auto c = CommunityStructure::from_assignment({5, 9, 5});
    CHECK(c.assignment == std::vector<CommunityId>{0, 1, 0});
    CHECK(c.sizes == std::vector<std::uint32_t>{2, 1});
    CHECK(c.community_count() == 2);
    CHECK(c.community_of(1) == 1);

    auto groups = c.members();
    REQUIRE(groups.size() == 2);
    CHECK(groups[0] == std::vector<NodeId>{0, 2});
    CHECK(groups[1] == std::vector<NodeId>{1});

    CHECK_THROWS_AS(CommunityStructure::from_assignment({}), DataError);
}

TEST_CASE("modularity of the whole graph in one community is zero") {
    auto g = two_triangles();
    auto c = CommunityStructure::from_assignment(std::vector<CommunityId>(6, 0));
    CHECK(modularity(g, c) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two separate triangles split cleanly at modularity one half") {
    auto g = two_triangles();
    auto c = CommunityStructure::from_assignment({0, 0, 0, 1, 1, 1});
    CHECK(std::abs(modularity(g, c) - 0.5) < 1e-12);
}

TEST_CASE("modularity rejects empty graphs and mismatched assignments") {
    NetworkBuilder b;
    b.node("a").node("b").slices(1);
    auto g = aggregate(b.build());
    auto c = CommunityStructure::from_assignment({0, 1});
    CHECK_THROWS_WITH_AS(modularity(g, c), doctest::Contains("no edges"), DataError);

    auto g2 = two_triangles();
    CHECK_THROWS_AS(modularity(g2, c), DataError);  // 2 nodes assigned, 6 in the graph
}

TEST_CASE("modularity equals the pairwise definition on every partition of random graphs") {
    std::mt19937 rng(17);
    int graphs = 0;
    while (graphs < 10) {
        DynamicNetwork net = testutil::random_network(rng, 6, 2, 0.4);
        GlobalWeightedNetwork g = aggregate(net);
        if (g.total_weight == 0) continue;
        ++graphs;
        testutil::for_each_partition(g.n, [&](const std::vector<CommunityId>& assign) {
            auto c = CommunityStructure::from_assignment(assign);
            double lib = modularity(g, c);
            double ref = testutil::modularity_pairwise(g, assign);
            CHECK(std::abs(lib - ref) < 1e-9);
        });
    }
}

TEST_CASE("louvain recovers the two cliques and hits the exhaustive optimum") {
    auto g = cliques_with_bridge();
    CommunityStructure part = louvain(g, 42);

    REQUIRE(part.community_count() == 2);
    // labels sort c0..c4 < d0..d4, so nodes 0-4 are the left clique; community
    // ids are reindexed with the lowest member first
    for (NodeId v = 0; v < 5; ++v) CHECK(part.community_of(v) == 0);
    for (NodeId v = 5; v < 10; ++v) CHECK(part.community_of(v) == 1);

    double q = modularity(g, part);
    CHECK(std::abs(q - 19.0 / 42.0) < 1e-9);

    double best = -1.0;
    testutil::for_each_partition(g.n, [&](const std::vector<CommunityId>& assign) {
        best = std::max(best, testutil::modularity_pairwise(g, assign));
    });
    CHECK(std::abs(q - best) < 1e-9);
}

TEST_CASE("louvain is deterministic for a fixed seed and beats the singleton start") {
    std::mt19937 rng(23);
    for (int round = 0; round < 8; ++round) {
        DynamicNetwork net = testutil::random_network(rng, 18, 3, 0.2);
        GlobalWeightedNetwork g = aggregate(net);
        if (g.total_weight == 0) continue;

        CommunityStructure a = louvain(g, 7);
        CommunityStructure b = louvain(g, 7);
        CHECK(a.assignment == b.assignment);

        std::vector<CommunityId> singletons(g.n);
        for (NodeId v = 0; v < g.n; ++v) singletons[v] = v;
        double q0 = modularity(g, CommunityStructure::from_assignment(std::move(singletons)));
        CHECK(modularity(g, a) >= q0 - 1e-12);
    }
}

TEST_CASE("louvain never joins nodes from different connected components") {
    std::mt19937 rng(31);
    for (int round = 0; round < 6; ++round) {
        // two blobs with disjoint labels and no cross edges
        NetworkBuilder b;
        std::bernoulli_distribution coin(0.5);
        bool any = false;
        for (int u = 0; u < 8; ++u)
            for (int v = u + 1; v < 8; ++v) {
                if (coin(rng)) {
                    b.edge(1, "a" + std::to_string(u), "a" + std::to_string(v));
                    any = true;
                }
                if (coin(rng)) {
                    b.edge(1, "b" + std::to_string(u), "b" + std::to_string(v));
                    any = true;
                }
            }
        if (!any) continue;
        for (int u = 0; u < 8; ++u) {
            b.node("a" + std::to_string(u));
            b.node("b" + std::to_string(u));
        }
        DynamicNetwork net = b.build();
        CommunityStructure part = louvain(aggregate(net), 5);
        for (NodeId u = 0; u < net.node_count(); ++u)
            for (NodeId v = u + 1; v < net.node_count(); ++v)
                if (part.community_of(u) == part.community_of(v))
                    CHECK(net.label(u)[0] == net.label(v)[0]);
    }
}

TEST_CASE("louvain reindexes communities by size, largest first") {
    // a 4-clique plus one disjoint edge: the big community must get id 0 even
    // though the edge's nodes sort first alphabetically
    NetworkBuilder b;
    b.edge(1, "x1", "x2").edge(1, "x1", "x3").edge(1, "x1", "x4");
    b.edge(1, "x2", "x3").edge(1, "x2", "x4").edge(1, "x3", "x4");
    b.edge(1, "a1", "a2");
    DynamicNetwork net = b.build();
    CommunityStructure part = louvain(aggregate(net), 42);
    REQUIRE(part.community_count() == 2);
    CHECK(part.sizes[0] == 4);
    CHECK(part.sizes[1] == 2);
    CHECK(part.community_of(net.node_of("x1")) == 0);
    CHECK(part.community_of(net.node_of("a1")) == 1);
}

TEST_CASE("louvain requires at least one edge") {
    NetworkBuilder b;
    b.node("a").node("b").slices(1);
    CHECK_THROWS_AS(louvain(aggregate(b.build())), DataError);
}

TEST_CASE("filter_small keeps exactly the communities at or above the minimum size") {
    auto c = CommunityStructure::from_assignment({0, 1, 2, 2, 2, 2, 2});
    CHECK(c.sizes == std::vector<std::uint32_t>{1, 1, 5});
    CHECK(filter_small(c, 2) == std::vector<CommunityId>{2});
    CHECK(filter_small(c, 1) == std::vector<CommunityId>{0, 1, 2});
    CHECK(filter_small(c, 5) == std::vector<CommunityId>{2});
    CHECK(filter_small(c, 6).empty());
}

TEST_CASE("community csv round-trips and rejects incomplete or doubled rows") {
    std::vector<std::string> labels{"a", "b", "c"};
    auto c = CommunityStructure::from_assignment({1, 0, 1});
    auto dir = testutil::fresh_dir("communities_csv");
    auto path = dir / "communities.csv";

    save_communities_csv(c, labels, path.string());
    CHECK(testutil::read_file(path) == "node,community\na,1\nb,0\nc,1\n");
    CommunityStructure back = load_communities_csv(path.string(), labels);
    CHECK(back.assignment == c.assignment);
    CHECK(back.sizes == c.sizes);

    testutil::write_file(path, "node,community\na,0\nb,1\n");
    CHECK_THROWS_WITH_AS(load_communities_csv(path.string(), labels),
                         doctest::Contains("has no community"), DataError);

    testutil::write_file(path, "node,community\na,0\na,0\nb,1\nc,1\n");
    CHECK_THROWS_WITH_AS(load_communities_csv(path.string(), labels),
                         doctest::Contains("assigned twice"), DataError);

    testutil::write_file(path, "node,community\nz,0\na,0\nb,1\nc,1\n");
    CHECK_THROWS_WITH_AS(load_communities_csv(path.string(), labels),
                         doctest::Contains("unknown node"), DataError);

    testutil::write_file(path, "node,community\na,x\nb,1\nc,1\n");
    CHECK_THROWS_WITH_AS(load_communities_csv(path.string(), labels),
                         doctest::Contains("bad community id"), DataError);
}
