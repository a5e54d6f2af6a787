#include "hypertrust/hypergraph.hpp"

#include <algorithm>
#include <stdexcept>

namespace hypertrust {

const char* to_string(RelationKind kind) {
    switch (kind) {
        case RelationKind::Network: return "net";
        case RelationKind::Proximity: return "phy";
        case RelationKind::Collaboration: return "his";
        case RelationKind::Resource: return "res";
        case RelationKind::Interest: return "int";
        case RelationKind::CommonFriend: return "fri";
    }
    return "?";
}

RelationKind relation_kind_from_string(const std::string& s) {
    if (s == "net") return RelationKind::Network;
    if (s == "phy") return RelationKind::Proximity;
    if (s == "his") return RelationKind::Collaboration;
    if (s == "res") return RelationKind::Resource;
    if (s == "int") return RelationKind::Interest;
    if (s == "fri") return RelationKind::CommonFriend;
    throw std::invalid_argument("unknown relation kind: " + s);
}

Hypergraph::Hypergraph(Index num_devices) : num_devices_(num_devices) {
    if (num_devices < 0) throw std::invalid_argument("num_devices must be >= 0");
}

HyperedgeId Hypergraph::add_hyperedge(const std::vector<DeviceId>& members, double weight, RelationKind kind) {
    if (members.empty()) throw std::invalid_argument("hyperedge needs at least one member");
    if (weight < 0.0) throw std::invalid_argument("hyperedge weight must be >= 0");

    std::vector<DeviceId> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (DeviceId id : sorted) {
        if (id < 0 || id >= num_devices_) {
            throw std::invalid_argument("hyperedge member " + std::to_string(id) +
                                        " out of range [0, " + std::to_string(num_devices_) + ")");
        }
    }

    // Dedup within kind: repeated evidence keeps the max weight.
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].kind == kind && edges_[i].members == sorted) {
            edges_[i].weight = std::max(edges_[i].weight, weight);
            return static_cast<HyperedgeId>(i);
        }
    }

    edges_.push_back(Hyperedge{std::move(sorted), weight, kind});
    return static_cast<HyperedgeId>(edges_.size() - 1);
}

Matrix Hypergraph::incidence() const {
    Matrix h = Matrix::Zero(num_devices_, num_hyperedges());
    for (Index e = 0; e < num_hyperedges(); ++e) {
        for (DeviceId a : edges_[static_cast<std::size_t>(e)].members) h(a, e) = 1.0;
    }
    return h;
}

Vector Hypergraph::weights() const {
    Vector w(num_hyperedges());
    for (Index e = 0; e < num_hyperedges(); ++e) w(e) = edges_[static_cast<std::size_t>(e)].weight;
    return w;
}

int Hypergraph::count_of_kind(RelationKind kind) const {
    int n = 0;
    for (const auto& e : edges_) n += (e.kind == kind) ? 1 : 0;
    return n;
}

Vector device_degrees(const Hypergraph& g) {
    Vector deg = Vector::Zero(g.num_devices());
    for (const auto& e : g.hyperedges()) {
        for (DeviceId a : e.members) deg(a) += e.weight;
    }
    return deg;
}

Vector hyperedge_degrees(const Hypergraph& g) {
    Vector deg(g.num_hyperedges());
    for (Index e = 0; e < g.num_hyperedges(); ++e) {
        deg(e) = static_cast<double>(g.hyperedge(static_cast<HyperedgeId>(e)).members.size());
    }
    return deg;
}

Vector device_degrees(const Matrix& incidence, const Vector& weights) {
    if (incidence.cols() != weights.size()) {
        throw std::invalid_argument("incidence/weight size mismatch");
    }
    return incidence * weights;
}

Vector hyperedge_degrees(const Matrix& incidence) {
    return incidence.colwise().sum().transpose();
}

Hypergraph union_of(const std::vector<Hypergraph>& graphs) {
    if (graphs.empty()) throw std::invalid_argument("union of an empty graph list");
    const Index n = graphs.front().num_devices();
    for (const auto& g : graphs) {
        if (g.num_devices() != n) {
            throw std::invalid_argument("union requires all graphs to share num_devices");
        }
    }
    Hypergraph all(n);
    for (const auto& g : graphs) {
        for (const auto& e : g.hyperedges()) all.add_hyperedge(e.members, e.weight, e.kind);
    }
    return all;
}

} // namespace hypertrust
