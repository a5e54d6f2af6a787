#include "hypertrust/trust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypertrust {

namespace {
constexpr double kNormEps = 1e-12;
}

double trust(const Eigen::Ref<const Eigen::RowVectorXd>& x_i,
             const Eigen::Ref<const Eigen::RowVectorXd>& x_j, bool* degenerate_out) {
    if (x_i.size() != x_j.size()) throw std::invalid_argument("trust: embedding sizes differ");
    if (!x_i.allFinite() || !x_j.allFinite()) throw std::invalid_argument("trust: non-finite embedding");

    const double norm_i = x_i.norm();
    const double norm_j = x_j.norm();
    if (degenerate_out) *degenerate_out = (norm_i == 0.0 || norm_j == 0.0);
    if (norm_i == 0.0 || norm_j == 0.0) return 0.0;

    const double value = x_i.dot(x_j) / (norm_i * norm_j + kNormEps);
    return std::clamp(value, -1.0, 1.0);
}

TrustRanking rank(DeviceId initiator, const Matrix& device_embeddings) {
    const Index n = device_embeddings.rows();
    if (initiator < 0 || initiator >= n) {
        throw std::invalid_argument("rank: initiator id " + std::to_string(initiator) + " out of range");
    }
    TrustRanking ranking;
    ranking.initiator = initiator;
    ranking.entries.reserve(static_cast<std::size_t>(n - 1));
    for (DeviceId j = 0; j < n; ++j) {
        if (j == initiator) continue;
        ranking.entries.emplace_back(j, trust(device_embeddings.row(initiator), device_embeddings.row(j)));
    }
    std::sort(ranking.entries.begin(), ranking.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranking;
}

DeviceId select_collaborator(DeviceId initiator, const Matrix& device_embeddings) {
    if (device_embeddings.rows() < 2) {
        throw std::invalid_argument("select_collaborator: need at least 2 devices");
    }
    return rank(initiator, device_embeddings).entries.front().first;
}

} // namespace hypertrust
