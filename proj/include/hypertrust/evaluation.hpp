#pragma once

#include "hypertrust/builders.hpp"
#include "hypertrust/dataset.hpp"
#include "hypertrust/trainer.hpp"
#include "hypertrust/types.hpp"

#include <cstdint>
#include <vector>

namespace hypertrust {

enum class DistanceMetric { Cosine, Euclidean };

// Mean over points of (b - a) / max(a, b), with a the mean intra-cluster
// distance and b the mean distance to the nearest other cluster. Every
// label class needs >= 2 members.
double silhouette_score(const Matrix& points, const std::vector<int>& labels,
                        DistanceMetric metric = DistanceMetric::Cosine);

// Silhouette of {initiator + top-k trusted} vs the rest, cosine distance on
// embedding rows.
double trust_cluster_ss(const Matrix& device_embeddings, DeviceId initiator, int k);

struct TrustHistogram {
    std::vector<double> bin_lo;
    std::vector<double> bin_hi;
    std::vector<double> proportion; // sums to 1 over all non-initiator devices
};

// Trust values of all non-initiator devices binned into (lo, hi] intervals;
// out-of-range values are counted in the nearest end bin.
TrustHistogram trust_distribution(const Matrix& device_embeddings, DeviceId initiator,
                                  const std::vector<double>& bin_edges);

struct SensitivityGrid {
    std::vector<double> p_a_values;
    std::vector<double> p_h_values;
    Matrix ss;                       // |p_a| x |p_h|; NaN marks a failed cell
    std::vector<std::uint64_t> seeds; // row-major per cell
};

struct SweepConfig {
    TrainConfig train;
    DeviceId initiator = 5;
    int top_k = 8;
    int workers = 2;
};

// One full train + trust_cluster_ss per grid cell; cell seeds are
// base seed + row-major cell offset, so results are independent of both
// traversal and worker scheduling. Failed cells are recorded as NaN.
SensitivityGrid sensitivity_sweep(const Hypergraph& graph, const SweepConfig& config,
                                  const std::vector<double>& p_a_values,
                                  const std::vector<double>& p_h_values);

struct ScalingRow {
    Index size = 0;
    DeviceId selected = -1;
    double trust_value = 0.0;
};

// Retrains on the first `size` devices of the dataset for each requested
// size and reports the selected collaborator; sizes < 2 are skipped.
std::vector<ScalingRow> node_count_experiment(const Dataset& dataset, const std::vector<Index>& sizes,
                                              const TrainConfig& config, const BuildConfig& build,
                                              DeviceId initiator);

// Projection onto the top-2 principal components (power iteration with
// deflation), centered.
Matrix pca_2d(const Matrix& x);

} // namespace hypertrust
