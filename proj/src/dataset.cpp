#include "hypertrust/dataset.hpp"

#include <algorithm>
#include <stdexcept>

namespace hypertrust {

int Dataset::num_interests() const {
    int max_id = -1;
    for (const auto& set : interests) {
        for (int b : set) max_id = std::max(max_id, b);
    }
    return max_id + 1;
}

void Dataset::validate() const {
    const Index n = num_devices();
    for (Index i = 0; i < n; ++i) {
        const auto& d = devices[static_cast<std::size_t>(i)];
        if (d.id != static_cast<DeviceId>(i)) {
            throw std::invalid_argument("device ids must be dense 0..n-1; slot " + std::to_string(i) +
                                        " holds id " + std::to_string(d.id));
        }
        if (d.x < 0.0 || d.x > 1.0 || d.y < 0.0 || d.y > 1.0) {
            throw std::invalid_argument("device " + std::to_string(d.id) + " position outside [0,1]^2");
        }
        if (d.device_type.empty()) {
            throw std::invalid_argument("device " + std::to_string(d.id) + " has an empty type label");
        }
    }

    auto check_pair = [n](const std::pair<DeviceId, DeviceId>& p, const char* what) {
        if (p.first < 0 || p.first >= n || p.second < 0 || p.second >= n) {
            throw std::invalid_argument(std::string(what) + " references unknown device id");
        }
        if (p.first == p.second) {
            throw std::invalid_argument(std::string(what) + " contains a self-loop on device " +
                                        std::to_string(p.first));
        }
    };
    for (const auto& p : links) check_pair(p, "link");
    for (const auto& p : friendships) check_pair(p, "friendship");

    if (static_cast<Index>(interests.size()) != n) {
        throw std::invalid_argument("interest table must have one row per device");
    }
    for (const auto& set : interests) {
        for (int b : set) {
            if (b < 0) throw std::invalid_argument("negative interest id");
        }
    }

    for (const auto& rec : collaborations) {
        if (rec.members.size() < 2) {
            throw std::invalid_argument("collaboration record with fewer than 2 members");
        }
        for (DeviceId a : rec.members) {
            if (a < 0 || a >= n) throw std::invalid_argument("collaboration references unknown device id");
        }
    }
}

Dataset Dataset::subset_first(Index size) const {
    if (size < 0 || size > num_devices()) {
        throw std::invalid_argument("subset size out of range");
    }
    Dataset out;
    out.devices.assign(devices.begin(), devices.begin() + size);
    for (const auto& p : links) {
        if (p.first < size && p.second < size) out.links.push_back(p);
    }
    for (const auto& p : friendships) {
        if (p.first < size && p.second < size) out.friendships.push_back(p);
    }
    out.interests.assign(interests.begin(), interests.begin() + std::min<std::size_t>(interests.size(), static_cast<std::size_t>(size)));
    out.interests.resize(static_cast<std::size_t>(size));
    for (const auto& rec : collaborations) {
        CollaborationRecord kept;
        kept.success = rec.success;
        for (DeviceId a : rec.members) {
            if (a < size) kept.members.push_back(a);
        }
        if (kept.members.size() >= 2) out.collaborations.push_back(std::move(kept));
    }
    return out;
}

} // namespace hypertrust
