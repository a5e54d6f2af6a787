#include "hypertrust/builders.hpp"
#include "hypertrust/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

using namespace hypertrust;

namespace {

double partition_sse(const std::vector<Point2>& pts, const std::vector<int>& labels, int k) {
    double sse = 0.0;
    for (int c = 0; c < k; ++c) {
        double sx = 0.0, sy = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (labels[i] == c) { sx += pts[i].x; sy += pts[i].y; ++count; }
        }
        if (count == 0) continue;
        const double cx = sx / count, cy = sy / count;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (labels[i] == c) {
                sse += (pts[i].x - cx) * (pts[i].x - cx) + (pts[i].y - cy) * (pts[i].y - cy);
            }
        }
    }
    return sse;
}

// Exhaustive 2-partition oracle: the SSE-minimizing split.
std::pair<double, std::vector<int>> best_two_partition(const std::vector<Point2>& pts) {
    const std::size_t n = pts.size();
    double best = 1e300;
    std::vector<int> best_labels;
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1u;
        const double sse = partition_sse(pts, labels, 2);
        if (sse < best) { best = sse; best_labels = labels; }
    }
    return {best, best_labels};
}

std::multiset<std::vector<DeviceId>> member_multiset(const Hypergraph& g) {
    std::multiset<std::vector<DeviceId>> out;
    for (const auto& e : g.hyperedges()) out.insert(e.members);
    return out;
}

} // namespace

TEST_CASE("kmeans recovers two tight pairs") {
    const std::vector<Point2> pts = {{0.0, 0.0}, {0.0, 0.01}, {1.0, 1.0}, {1.0, 0.99}};
    const ClusterAssignment got = kmeans(pts, 2, 11);
    const auto [best_sse, best_labels] = best_two_partition(pts);
    CHECK(got.sse == doctest::Approx(best_sse).epsilon(1e-12));
    CHECK(got.assignments[0] == got.assignments[1]);
    CHECK(got.assignments[2] == got.assignments[3]);
    CHECK(got.assignments[0] != got.assignments[2]);
}

TEST_CASE("kmeans degenerate ks") {
    const std::vector<Point2> pts = {{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.0}};
    const ClusterAssignment one = kmeans(pts, 1, 3);
    CHECK(one.centroids[0].x == doctest::Approx(0.5));
    CHECK(one.centroids[0].y == doctest::Approx(1.0 / 6.0));
    for (int a : one.assignments) CHECK(a == 0);

    const ClusterAssignment each = kmeans(pts, 3, 3);
    CHECK(each.sse == 0.0);
    std::set<int> distinct(each.assignments.begin(), each.assignments.end());
    CHECK(distinct.size() == 3);

    CHECK_THROWS_AS(kmeans(pts, 4, 3), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(pts, 0, 3), std::invalid_argument);
}

TEST_CASE("kmeans is deterministic and SSE non-increasing in iteration budget") {
    Rng rng(99);
    std::vector<Point2> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(Point2{rng.next_double(), rng.next_double()});

    const ClusterAssignment a = kmeans(pts, 4, 17);
    const ClusterAssignment b = kmeans(pts, 4, 17);
    CHECK(a.assignments == b.assignments);
    CHECK(a.sse == b.sse);

    double prev = 1e300;
    for (int iters = 1; iters <= 6; ++iters) {
        const double sse = kmeans(pts, 4, 17, iters).sse;
        CHECK(sse <= prev + 1e-12);
        prev = sse;
    }
}

TEST_CASE("kmeans repairs empty clusters") {
    // three coincident points and one far away, k=3: kmeans++ may seed twice
    // on the heap; every cluster must still end non-empty
    const std::vector<Point2> pts = {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ClusterAssignment got = kmeans(pts, 3, seed);
        std::set<int> used(got.assignments.begin(), got.assignments.end());
        CHECK(used.size() == 3);
    }
}

TEST_CASE("build_network maps distinct undirected links") {
    const Hypergraph g = build_network({{0, 1}, {1, 2}}, 3);
    CHECK(g.num_hyperedges() == 2);
    CHECK(member_multiset(g) == std::multiset<std::vector<DeviceId>>{{0, 1}, {1, 2}});

    CHECK(build_network({{0, 1}, {1, 0}}, 2).num_hyperedges() == 1);
    CHECK(build_network({}, 2).num_hyperedges() == 0);

    int skipped = 0;
    const Hypergraph with_loop = build_network({{0, 0}, {0, 1}}, 2, &skipped);
    CHECK(skipped == 1);
    CHECK(with_loop.num_hyperedges() == 1);
}

TEST_CASE("build_proximity emits one hyperedge per cluster") {
    const std::vector<Point2> pairs = {{0.0, 0.0}, {0.0, 0.01}, {1.0, 1.0}, {1.0, 0.99}};
    const Hypergraph two = build_proximity(pairs, 2, 11);
    REQUIRE(two.num_hyperedges() == 2);
    CHECK(two.hyperedge(0).members.size() == 2);
    CHECK(two.hyperedge(1).members.size() == 2);
    CHECK(two.count_of_kind(RelationKind::Proximity) == 2);

    const Hypergraph one = build_proximity(pairs, 1, 11);
    REQUIRE(one.num_hyperedges() == 1);
    CHECK(one.hyperedge(0).members.size() == 4);

    const Hypergraph solo = build_proximity({{0.5, 0.5}}, 1, 11);
    REQUIRE(solo.num_hyperedges() == 1);
    CHECK(solo.hyperedge(0).members == std::vector<DeviceId>{0});
}

TEST_CASE("build_collaboration weights success and merges duplicates") {
    const Hypergraph success = build_collaboration({{{0, 1, 2}, true}}, 3);
    REQUIRE(success.num_hyperedges() == 1);
    CHECK(success.hyperedge(0).members == std::vector<DeviceId>{0, 1, 2});
    CHECK(success.hyperedge(0).weight == 1.0);
    CHECK(success.hyperedge(0).kind == RelationKind::Collaboration);

    const Hypergraph failure = build_collaboration({{{0, 1}, false}}, 2);
    CHECK(failure.hyperedge(0).weight == 0.0);

    const Hypergraph twice = build_collaboration({{{0, 1}, true}, {{1, 0}, true}}, 2);
    CHECK(twice.num_hyperedges() == 1);
    CHECK(twice.hyperedge(0).weight == 1.0);

    int skipped = 0;
    const Hypergraph bad = build_collaboration({{{0}, true}, {{0, 1}, true}}, 2, &skipped);
    CHECK(skipped == 1);
    CHECK(bad.num_hyperedges() == 1);
}

TEST_CASE("build_resource groups types with at least two members") {
    const Hypergraph g = build_resource({"p", "p", "c"});
    REQUIRE(g.num_hyperedges() == 1);
    CHECK(g.hyperedge(0).members == std::vector<DeviceId>{0, 1});

    const Hypergraph all = build_resource({"x", "x", "x"});
    REQUIRE(all.num_hyperedges() == 1);
    CHECK(all.hyperedge(0).members.size() == 3);

    CHECK(build_resource({"a", "b", "c"}).num_hyperedges() == 0);
}

TEST_CASE("build_interest links devices sharing an interest") {
    const Hypergraph g = build_interest({{5}, {5}, {7}}, 8);
    REQUIRE(g.num_hyperedges() == 1);
    CHECK(g.hyperedge(0).members == std::vector<DeviceId>{0, 1});

    CHECK(build_interest({{0}, {1}, {2}}, 3).num_hyperedges() == 0);

    const Hypergraph all = build_interest({{0}, {0}, {0}}, 1);
    REQUIRE(all.num_hyperedges() == 1);
    CHECK(all.hyperedge(0).members.size() == 3);
}

TEST_CASE("build_common_friend links neighbor pairs of every device") {
    const Hypergraph pair = build_common_friend({{0, 1}, {0, 2}}, 3);
    REQUIRE(pair.num_hyperedges() == 1);
    CHECK(pair.hyperedge(0).members == std::vector<DeviceId>{1, 2});
    CHECK(pair.hyperedge(0).kind == RelationKind::CommonFriend);

    CHECK(build_common_friend({{0, 1}}, 2).num_hyperedges() == 0);

    const Hypergraph star = build_common_friend({{0, 1}, {0, 2}, {0, 3}}, 4);
    CHECK(member_multiset(star) == std::multiset<std::vector<DeviceId>>{{1, 2}, {1, 3}, {2, 3}});
}

TEST_CASE("common-friend construction commutes with device relabeling") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 6;
        std::vector<std::pair<DeviceId, DeviceId>> friendships;
        for (DeviceId i = 0; i < n; ++i) {
            for (DeviceId j = i + 1; j < n; ++j) {
                if (rng.next_bernoulli(0.4)) friendships.emplace_back(i, j);
            }
        }
        // random permutation
        std::vector<DeviceId> perm(n);
        for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = static_cast<DeviceId>(i);
        for (Index i = n - 1; i > 0; --i) {
            std::swap(perm[static_cast<std::size_t>(i)], perm[rng.next_below(static_cast<std::uint64_t>(i + 1))]);
        }
        std::vector<std::pair<DeviceId, DeviceId>> relabeled;
        for (const auto& [a, b] : friendships) {
            relabeled.emplace_back(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
        }

        auto relabel_multiset = [&](const Hypergraph& g) {
            std::multiset<std::vector<DeviceId>> out;
            for (const auto& e : g.hyperedges()) {
                std::vector<DeviceId> m;
                for (DeviceId d : e.members) m.push_back(perm[static_cast<std::size_t>(d)]);
                std::sort(m.begin(), m.end());
                out.insert(m);
            }
            return out;
        };

        const Hypergraph base = build_common_friend(friendships, n);
        const Hypergraph permuted = build_common_friend(relabeled, n);
        CHECK(relabel_multiset(base) == member_multiset(permuted));
    }
}

TEST_CASE("every builder emits only its own kind") {
    const Hypergraph net = build_network({{0, 1}}, 2);
    const Hypergraph phy = build_proximity({{0.1, 0.1}, {0.9, 0.9}}, 2, 1);
    const Hypergraph his = build_collaboration({{{0, 1}, true}}, 2);
    const Hypergraph res = build_resource({"a", "a"});
    const Hypergraph intg = build_interest({{0}, {0}}, 1);
    const Hypergraph fri = build_common_friend({{0, 1}, {1, 0}, {0, 1}}, 2);
    CHECK(net.count_of_kind(RelationKind::Network) == net.num_hyperedges());
    CHECK(phy.count_of_kind(RelationKind::Proximity) == phy.num_hyperedges());
    CHECK(his.count_of_kind(RelationKind::Collaboration) == his.num_hyperedges());
    CHECK(res.count_of_kind(RelationKind::Resource) == res.num_hyperedges());
    CHECK(intg.count_of_kind(RelationKind::Interest) == intg.num_hyperedges());
    CHECK(fri.count_of_kind(RelationKind::CommonFriend) == fri.num_hyperedges());
}

TEST_CASE("build_all unions the six relationship hypergraphs") {
    // hand-built dataset: 2 links, 2 location clusters, 1 collaboration,
    // 1 shared type, 1 shared interest, 1 common-friend pair -> 8 hyperedges
    Dataset ds;
    ds.devices = {
        {0, 0.10, 0.10, "a"}, {1, 0.12, 0.10, "a"}, {2, 0.10, 0.12, "b"},
        {3, 0.90, 0.90, "c"}, {4, 0.92, 0.90, "d"}, {5, 0.90, 0.92, "e"},
    };
    ds.links = {{0, 3}, {1, 4}};
    ds.friendships = {{4, 0}, {4, 5}};
    ds.interests.resize(6);
    ds.interests[2] = {0};
    ds.interests[3] = {0};
    ds.collaborations = {{{0, 1, 2}, true}};

    const Hypergraph all = build_all(ds, BuildConfig{2, 11});
    CHECK(all.count_of_kind(RelationKind::Network) == 2);
    CHECK(all.count_of_kind(RelationKind::Proximity) == 2);
    CHECK(all.count_of_kind(RelationKind::Collaboration) == 1);
    CHECK(all.count_of_kind(RelationKind::Resource) == 1);
    CHECK(all.count_of_kind(RelationKind::Interest) == 1);
    CHECK(all.count_of_kind(RelationKind::CommonFriend) == 1);
    CHECK(all.num_hyperedges() == 8);

    // positions only: just proximity hyperedges survive
    Dataset sparse;
    sparse.devices = ds.devices;
    for (std::size_t i = 0; i < sparse.devices.size(); ++i) {
        sparse.devices[i].device_type = "t" + std::to_string(i); // all distinct
    }
    sparse.interests.resize(6);
    const Hypergraph phy_only = build_all(sparse, BuildConfig{2, 11});
    CHECK(phy_only.num_hyperedges() == phy_only.count_of_kind(RelationKind::Proximity));
    CHECK(phy_only.num_hyperedges() > 0);
}

TEST_CASE("default cluster count follows the sqrt heuristic") {
    CHECK(default_cluster_count(4) == 2);
    CHECK(default_cluster_count(76) == 9);
    CHECK(default_cluster_count(2) == 2);
}
