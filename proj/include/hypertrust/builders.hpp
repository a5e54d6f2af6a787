#pragma once

#include "hypertrust/dataset.hpp"
#include "hypertrust/hypergraph.hpp"
#include "hypertrust/types.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hypertrust {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct ClusterAssignment {
    std::vector<int> assignments;  // device id -> cluster index in [0, k)
    std::vector<Point2> centroids; // k centroids
    double sse = 0.0;              // within-cluster sum of squared distances
};

// Lloyd k-means with k-means++ seeding. Deterministic given seed. Empty
// clusters are repaired by stealing the farthest point from the largest
// cluster. Throws std::invalid_argument when k < 1, k > |points| or
// max_iters < 1.
ClusterAssignment kmeans(const std::vector<Point2>& points, int k, std::uint64_t seed, int max_iters = 100);

// One 2-member hyperedge per distinct undirected link, weight 1, kind
// Network. Self-loop pairs are skipped; skipped_out (optional) receives the
// count.
Hypergraph build_network(const std::vector<std::pair<DeviceId, DeviceId>>& links, Index n,
                         int* skipped_out = nullptr);

// One hyperedge per location cluster (kind Proximity, weight 1); singleton
// clusters still emit a hyperedge.
Hypergraph build_proximity(const std::vector<Point2>& positions, int k, std::uint64_t seed);

// One hyperedge per collaboration record (kind Collaboration); weight 1 on
// success, 0 on failure. Records with < 2 members are skipped and counted.
Hypergraph build_collaboration(const std::vector<CollaborationRecord>& records, Index n,
                               int* skipped_out = nullptr);

// One hyperedge per device type shared by >= 2 devices (kind Resource).
Hypergraph build_resource(const std::vector<std::string>& types);

// One hyperedge per interest shared by >= 2 devices (kind Interest).
Hypergraph build_interest(const std::vector<std::set<int>>& interests, int b_total);

// For every device and every unordered pair of its friends, one hyperedge
// containing just the indirectly linked pair (kind CommonFriend).
Hypergraph build_common_friend(const std::vector<std::pair<DeviceId, DeviceId>>& friendships, Index n);

struct BuildConfig {
    int proximity_clusters = 0; // 0: default max(2, round(sqrt(n)))
    std::uint64_t seed = 1;
};

int default_cluster_count(Index n);

// Union of all six relationship hypergraphs of a validated dataset.
Hypergraph build_all(const Dataset& dataset, const BuildConfig& config);

} // namespace hypertrust
