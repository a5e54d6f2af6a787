#pragma once

#include "hypertrust/hgnn.hpp"
#include "hypertrust/types.hpp"

#include <utility>
#include <vector>

namespace hypertrust {

// Ordered trust list for one initiator: descending trust, ties broken by
// ascending device id; the initiator itself is excluded.
struct TrustRanking {
    DeviceId initiator = 0;
    std::vector<std::pair<DeviceId, double>> entries;
};

// Cosine similarity with an eps-guarded norm product, clamped to [-1, 1].
// Zero-norm embeddings yield trust 0; degenerate_out (optional) is set when
// that happens.
double trust(const Eigen::Ref<const Eigen::RowVectorXd>& x_i,
             const Eigen::Ref<const Eigen::RowVectorXd>& x_j,
             bool* degenerate_out = nullptr);

TrustRanking rank(DeviceId initiator, const Matrix& device_embeddings);

// First entry of rank(); needs at least 2 devices.
DeviceId select_collaborator(DeviceId initiator, const Matrix& device_embeddings);

} // namespace hypertrust
