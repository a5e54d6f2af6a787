#include "hypertrust/builders.hpp"

#include "hypertrust/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace hypertrust {

namespace {

double sq_dist(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// k-means++: first centroid uniform, then proportional to squared distance
// from the nearest chosen centroid.
std::vector<Point2> seed_centroids(const std::vector<Point2>& points, int k, Rng& rng) {
    std::vector<Point2> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    centroids.push_back(points[rng.next_below(points.size())]);

    std::vector<double> d2(points.size());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sq_dist(points[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            // all remaining points coincide with chosen centroids
            pick = rng.next_below(points.size());
        } else {
            double r = rng.next_double() * total;
            pick = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                r -= d2[i];
                if (r <= 0.0) { pick = i; break; }
            }
        }
        centroids.push_back(points[pick]);
    }
    return centroids;
}

} // namespace

ClusterAssignment kmeans(const std::vector<Point2>& points, int k, std::uint64_t seed, int max_iters) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (static_cast<std::size_t>(k) > points.size()) {
        throw std::invalid_argument("kmeans: k (" + std::to_string(k) + ") exceeds point count (" +
                                    std::to_string(points.size()) + ")");
    }
    if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be >= 1");

    Rng rng(seed);
    std::vector<Point2> centroids = seed_centroids(points, k, rng);
    std::vector<int> assign(points.size(), 0);

    auto assign_all = [&]() {
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                const double d = sq_dist(points[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best) { best = d; best_c = c; }
            }
            assign[i] = best_c;
        }
    };

    auto repair_empty = [&]() {
        std::vector<std::vector<std::size_t>> by_cluster(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < points.size(); ++i) by_cluster[static_cast<std::size_t>(assign[i])].push_back(i);
        for (int c = 0; c < k; ++c) {
            if (!by_cluster[static_cast<std::size_t>(c)].empty()) continue;
            // steal the farthest point from the largest cluster
            int largest = 0;
            for (int o = 0; o < k; ++o) {
                if (by_cluster[static_cast<std::size_t>(o)].size() > by_cluster[static_cast<std::size_t>(largest)].size()) largest = o;
            }
            std::size_t far_idx = by_cluster[static_cast<std::size_t>(largest)].front();
            double far_d = -1.0;
            for (std::size_t i : by_cluster[static_cast<std::size_t>(largest)]) {
                const double d = sq_dist(points[i], centroids[static_cast<std::size_t>(largest)]);
                if (d > far_d) { far_d = d; far_idx = i; }
            }
            auto& src = by_cluster[static_cast<std::size_t>(largest)];
            src.erase(std::find(src.begin(), src.end(), far_idx));
            by_cluster[static_cast<std::size_t>(c)].push_back(far_idx);
            assign[far_idx] = c;
            centroids[static_cast<std::size_t>(c)] = points[far_idx];
        }
    };

    assign_all();
    repair_empty();

    for (int iter = 0; iter < max_iters; ++iter) {
        // centroid update
        std::vector<Point2> sums(static_cast<std::size_t>(k), Point2{});
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sums[static_cast<std::size_t>(assign[i])].x += points[i].x;
            sums[static_cast<std::size_t>(assign[i])].y += points[i].y;
            counts[static_cast<std::size_t>(assign[i])]++;
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids[static_cast<std::size_t>(c)].x = sums[static_cast<std::size_t>(c)].x / counts[static_cast<std::size_t>(c)];
                centroids[static_cast<std::size_t>(c)].y = sums[static_cast<std::size_t>(c)].y / counts[static_cast<std::size_t>(c)];
            }
        }

        std::vector<int> prev = assign;
        assign_all();
        repair_empty();
        if (assign == prev) break;
    }

    ClusterAssignment out;
    out.assignments = std::move(assign);
    out.centroids = std::move(centroids);
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.sse += sq_dist(points[i], out.centroids[static_cast<std::size_t>(out.assignments[i])]);
    }
    return out;
}

Hypergraph build_network(const std::vector<std::pair<DeviceId, DeviceId>>& links, Index n, int* skipped_out) {
    Hypergraph g(n);
    int skipped = 0;
    for (const auto& [a, b] : links) {
        if (a == b) { ++skipped; continue; }
        g.add_hyperedge({a, b}, 1.0, RelationKind::Network);
    }
    if (skipped_out) *skipped_out = skipped;
    return g;
}

Hypergraph build_proximity(const std::vector<Point2>& positions, int k, std::uint64_t seed) {
    const ClusterAssignment clusters = kmeans(positions, k, seed);
    Hypergraph g(static_cast<Index>(positions.size()));
    std::vector<std::vector<DeviceId>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < positions.size(); ++i) {
        members[static_cast<std::size_t>(clusters.assignments[i])].push_back(static_cast<DeviceId>(i));
    }
    for (const auto& m : members) {
        if (!m.empty()) g.add_hyperedge(m, 1.0, RelationKind::Proximity);
    }
    return g;
}

Hypergraph build_collaboration(const std::vector<CollaborationRecord>& records, Index n, int* skipped_out) {
    Hypergraph g(n);
    int skipped = 0;
    for (const auto& rec : records) {
        std::vector<DeviceId> unique = rec.members;
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        if (unique.size() < 2) { ++skipped; continue; }
        g.add_hyperedge(unique, rec.success ? 1.0 : 0.0, RelationKind::Collaboration);
    }
    if (skipped_out) *skipped_out = skipped;
    return g;
}

Hypergraph build_resource(const std::vector<std::string>& types) {
    Hypergraph g(static_cast<Index>(types.size()));
    std::map<std::string, std::vector<DeviceId>> groups;
    for (std::size_t i = 0; i < types.size(); ++i) groups[types[i]].push_back(static_cast<DeviceId>(i));
    for (const auto& [type, members] : groups) {
        if (members.size() >= 2) g.add_hyperedge(members, 1.0, RelationKind::Resource);
    }
    return g;
}

Hypergraph build_interest(const std::vector<std::set<int>>& interests, int b_total) {
    const Index n = static_cast<Index>(interests.size());
    Hypergraph g(n);
    std::vector<std::vector<DeviceId>> holders(static_cast<std::size_t>(b_total));
    for (Index i = 0; i < n; ++i) {
        for (int b : interests[static_cast<std::size_t>(i)]) {
            if (b < 0 || b >= b_total) {
                throw std::invalid_argument("interest id " + std::to_string(b) + " out of range");
            }
            holders[static_cast<std::size_t>(b)].push_back(static_cast<DeviceId>(i));
        }
    }
    for (const auto& members : holders) {
        if (members.size() >= 2) g.add_hyperedge(members, 1.0, RelationKind::Interest);
    }
    return g;
}

Hypergraph build_common_friend(const std::vector<std::pair<DeviceId, DeviceId>>& friendships, Index n) {
    std::vector<std::set<DeviceId>> neighbors(static_cast<std::size_t>(n));
    for (const auto& [a, b] : friendships) {
        if (a == b) continue;
        if (a < 0 || a >= n || b < 0 || b >= n) {
            throw std::invalid_argument("friendship references unknown device id");
        }
        neighbors[static_cast<std::size_t>(a)].insert(b);
        neighbors[static_cast<std::size_t>(b)].insert(a);
    }
    Hypergraph g(n);
    for (Index i = 0; i < n; ++i) {
        const auto& nb = neighbors[static_cast<std::size_t>(i)];
        for (auto it = nb.begin(); it != nb.end(); ++it) {
            for (auto jt = std::next(it); jt != nb.end(); ++jt) {
                g.add_hyperedge({*it, *jt}, 1.0, RelationKind::CommonFriend);
            }
        }
    }
    return g;
}

int default_cluster_count(Index n) {
    return std::max(2, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n)))));
}

Hypergraph build_all(const Dataset& dataset, const BuildConfig& config) {
    dataset.validate();
    const Index n = dataset.num_devices();

    std::vector<Point2> positions;
    std::vector<std::string> types;
    positions.reserve(static_cast<std::size_t>(n));
    types.reserve(static_cast<std::size_t>(n));
    for (const auto& d : dataset.devices) {
        positions.push_back(Point2{d.x, d.y});
        types.push_back(d.device_type);
    }

    const int k = config.proximity_clusters > 0 ? config.proximity_clusters
                                                : std::min<int>(default_cluster_count(n), static_cast<int>(n));

    std::vector<Hypergraph> parts;
    parts.push_back(build_network(dataset.links, n));
    parts.push_back(build_proximity(positions, k, config.seed));
    parts.push_back(build_collaboration(dataset.collaborations, n));
    parts.push_back(build_resource(types));
    parts.push_back(build_interest(dataset.interests, dataset.num_interests()));
    parts.push_back(build_common_friend(dataset.friendships, n));
    return union_of(parts);
}

} // namespace hypertrust
