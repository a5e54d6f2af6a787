#pragma once

#include "hypertrust/types.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hypertrust {

struct DeviceRecord {
    DeviceId id = 0;
    double x = 0.0; // position in [0,1]^2
    double y = 0.0;
    std::string device_type;
};

struct CollaborationRecord {
    std::vector<DeviceId> members; // size >= 2
    bool success = true;
};

// Raw device records from which the six relationship hypergraphs are built.
struct Dataset {
    std::vector<DeviceRecord> devices;                 // ids dense 0..n-1
    std::vector<std::pair<DeviceId, DeviceId>> links;  // undirected, no self-loops
    std::vector<std::pair<DeviceId, DeviceId>> friendships;
    std::vector<std::set<int>> interests;              // per device, interest ids
    std::vector<CollaborationRecord> collaborations;

    Index num_devices() const { return static_cast<Index>(devices.size()); }

    // Number of distinct interest ids (max id + 1).
    int num_interests() const;

    // Enforces every Dataset invariant; throws std::invalid_argument with a
    // description of the first violation.
    void validate() const;

    // Keeps devices 0..size-1 and drops every record touching a removed id.
    // Collaboration records are kept only if >= 2 members survive.
    Dataset subset_first(Index size) const;
};

} // namespace hypertrust
