#pragma once

#include "hypertrust/types.hpp"

#include <string>
#include <vector>

namespace hypertrust {

/// The six relationship kinds a hyperedge can encode.
enum class RelationKind {
    Network,      // direct communication link between two devices
    Proximity,    // physical-location cluster
    Collaboration,// shared task history (weight 1 success / 0 failure)
    Resource,     // same basic device type
    Interest,     // shared interest
    CommonFriend, // pair linked through a shared friend
};

constexpr int kRelationKindCount = 6;

const char* to_string(RelationKind kind);
RelationKind relation_kind_from_string(const std::string& s);

struct Hyperedge {
    std::vector<DeviceId> members; // sorted, unique
    double weight = 1.0;
    RelationKind kind = RelationKind::Network;
};

// Multi-relationship hypergraph over a fixed device set. Hyperedges are
// stored as sorted member lists; the dense incidence matrix and the degree
// vectors are materialized on demand. Duplicate (members, kind) pairs are
// merged keeping the larger weight. Read-only after construction; safe for
// concurrent reads.
class Hypergraph {
public:
    explicit Hypergraph(Index num_devices);

    Index num_devices() const { return num_devices_; }
    Index num_hyperedges() const { return static_cast<Index>(edges_.size()); }

    const std::vector<Hyperedge>& hyperedges() const { return edges_; }
    const Hyperedge& hyperedge(HyperedgeId id) const { return edges_.at(static_cast<std::size_t>(id)); }

    // Appends a hyperedge, or returns the id of an existing one with the
    // same (members, kind), keeping the larger weight. Members are
    // deduplicated and sorted. Throws std::invalid_argument on an empty
    // member set or an out-of-range device id.
    HyperedgeId add_hyperedge(const std::vector<DeviceId>& members, double weight, RelationKind kind);

    // Dense |A| x |E| incidence matrix H, h_ae = 1 iff device a in edge e.
    Matrix incidence() const;

    // Per-hyperedge weight vector (the diagonal of W).
    Vector weights() const;

    int count_of_kind(RelationKind kind) const;

private:
    Index num_devices_;
    std::vector<Hyperedge> edges_;
};

// delta(a_i) = sum_n w_n h(a_i, e_n); isolated devices get 0.
Vector device_degrees(const Hypergraph& g);

// delta(e_n) = |members of e_n|, independent of weight.
Vector hyperedge_degrees(const Hypergraph& g);

// Same formulas evaluated on a masked incidence matrix and weight vector.
Vector device_degrees(const Matrix& incidence, const Vector& weights);
Vector hyperedge_degrees(const Matrix& incidence);

// Concatenates the hyperedge lists of all graphs with per-kind
// deduplication. All graphs must share num_devices; an empty list is
// rejected.
Hypergraph union_of(const std::vector<Hypergraph>& graphs);

} // namespace hypertrust
