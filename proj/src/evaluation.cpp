#include "hypertrust/evaluation.hpp"

#include "hypertrust/rng.hpp"
#include "hypertrust/trust.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

namespace hypertrust {

namespace {

Matrix pairwise_distances(const Matrix& points, DistanceMetric metric) {
    const Index n = points.rows();
    Matrix dist(n, n);
    if (metric == DistanceMetric::Euclidean) {
        for (Index i = 0; i < n; ++i) {
            dist(i, i) = 0.0;
            for (Index j = i + 1; j < n; ++j) {
                const double d = (points.row(i) - points.row(j)).norm();
                dist(i, j) = d;
                dist(j, i) = d;
            }
        }
        return dist;
    }
    // cosine distance 1 - sim; zero-norm rows have sim 0 against everything
    Matrix unit = points;
    for (Index i = 0; i < n; ++i) {
        const double norm = unit.row(i).norm();
        if (norm > 0.0) unit.row(i) /= norm;
    }
    for (Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Index j = i + 1; j < n; ++j) {
            const double d = 1.0 - unit.row(i).dot(unit.row(j));
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }
    return dist;
}

} // namespace

double silhouette_score(const Matrix& points, const std::vector<int>& labels, DistanceMetric metric) {
    const Index n = points.rows();
    if (static_cast<Index>(labels.size()) != n) {
        throw std::invalid_argument("silhouette_score: one label per point required");
    }
    std::map<int, std::vector<Index>> clusters;
    for (Index i = 0; i < n; ++i) clusters[labels[static_cast<std::size_t>(i)]].push_back(i);
    if (clusters.size() < 2) throw std::invalid_argument("silhouette_score: need at least 2 clusters");
    for (const auto& [label, members] : clusters) {
        if (members.size() < 2) {
            throw std::invalid_argument("silhouette_score: cluster " + std::to_string(label) +
                                        " has fewer than 2 members");
        }
    }

    const Matrix dist = pairwise_distances(points, metric);
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const int own = labels[static_cast<std::size_t>(i)];
        double a = 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, members] : clusters) {
            double sum = 0.0;
            for (Index j : members) sum += dist(i, j);
            if (label == own) {
                a = sum / static_cast<double>(members.size() - 1); // exclude self
            } else {
                b = std::min(b, sum / static_cast<double>(members.size()));
            }
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

double trust_cluster_ss(const Matrix& device_embeddings, DeviceId initiator, int k) {
    const Index n = device_embeddings.rows();
    if (k < 1) throw std::invalid_argument("trust_cluster_ss: k must be >= 1");
    if (static_cast<Index>(k) >= n - 1) {
        throw std::invalid_argument("trust_cluster_ss: k must be < device count - 1");
    }
    const TrustRanking ranking = rank(initiator, device_embeddings);
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    labels[static_cast<std::size_t>(initiator)] = 1;
    for (int i = 0; i < k; ++i) {
        labels[static_cast<std::size_t>(ranking.entries[static_cast<std::size_t>(i)].first)] = 1;
    }
    return silhouette_score(device_embeddings, labels, DistanceMetric::Cosine);
}

TrustHistogram trust_distribution(const Matrix& device_embeddings, DeviceId initiator,
                                  const std::vector<double>& bin_edges) {
    if (bin_edges.size() < 2) throw std::invalid_argument("trust_distribution: need at least 2 bin edges");
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
        if (!(bin_edges[i] > bin_edges[i - 1])) {
            throw std::invalid_argument("trust_distribution: bin edges must be strictly increasing");
        }
    }
    const TrustRanking ranking = rank(initiator, device_embeddings);
    const std::size_t bins = bin_edges.size() - 1;

    TrustHistogram hist;
    hist.bin_lo.assign(bin_edges.begin(), bin_edges.end() - 1);
    hist.bin_hi.assign(bin_edges.begin() + 1, bin_edges.end());
    hist.proportion.assign(bins, 0.0);

    for (const auto& [id, value] : ranking.entries) {
        std::size_t bin = bins - 1;
        for (std::size_t b = 0; b < bins; ++b) {
            if (value <= hist.bin_hi[b]) { bin = b; break; }
        }
        hist.proportion[bin] += 1.0;
    }
    const double count = static_cast<double>(ranking.entries.size());
    for (double& p : hist.proportion) p /= count;
    return hist;
}

SensitivityGrid sensitivity_sweep(const Hypergraph& graph, const SweepConfig& config,
                                  const std::vector<double>& p_a_values,
                                  const std::vector<double>& p_h_values) {
    for (double p : p_a_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sweep: p_a value outside [0, 1]");
    }
    for (double p : p_h_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sweep: p_h value outside [0, 1]");
    }

    const Index rows = static_cast<Index>(p_a_values.size());
    const Index cols = static_cast<Index>(p_h_values.size());

    SensitivityGrid grid;
    grid.p_a_values = p_a_values;
    grid.p_h_values = p_h_values;
    grid.ss = Matrix::Constant(rows, cols, std::numeric_limits<double>::quiet_NaN());
    grid.seeds.resize(static_cast<std::size_t>(rows * cols));

    const int total = static_cast<int>(rows * cols);
    std::atomic<int> next{0};

    auto run_cell = [&](int cell) {
        const Index r = cell / cols;
        const Index c = cell % cols;
        const std::uint64_t seed = config.train.seed + static_cast<std::uint64_t>(cell);
        grid.seeds[static_cast<std::size_t>(cell)] = seed;
        try {
            TrainConfig cell_config = config.train;
            cell_config.p_a = p_a_values[static_cast<std::size_t>(r)];
            cell_config.p_h = p_h_values[static_cast<std::size_t>(c)];
            cell_config.seed = seed;
            const TrainReport report = train(graph, cell_config);
            const EmbeddingPair emb = infer_embeddings(graph, report.params, cell_config.activation);
            grid.ss(r, c) = trust_cluster_ss(emb.devices, config.initiator, config.top_k);
        } catch (const std::exception&) {
            // leave NaN, sweep continues
        }
    };

    const int workers = std::max(1, config.workers);
    if (workers == 1) {
        for (int cell = 0; cell < total; ++cell) run_cell(cell);
        return grid;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int cell = next.fetch_add(1); cell < total; cell = next.fetch_add(1)) run_cell(cell);
        });
    }
    for (auto& t : pool) t.join();
    return grid;
}

std::vector<ScalingRow> node_count_experiment(const Dataset& dataset, const std::vector<Index>& sizes,
                                              const TrainConfig& config, const BuildConfig& build,
                                              DeviceId initiator) {
    std::vector<ScalingRow> table;
    for (Index size : sizes) {
        if (size < 2) continue; // nothing to rank
        if (size > dataset.num_devices()) {
            throw std::invalid_argument("node_count_experiment: size exceeds dataset device count");
        }
        if (initiator >= size) {
            throw std::invalid_argument("node_count_experiment: initiator outside subset of size " +
                                        std::to_string(size));
        }
        const Dataset subset = dataset.subset_first(size);
        const Hypergraph graph = build_all(subset, build);
        const TrainReport report = train(graph, config);
        const EmbeddingPair emb = infer_embeddings(graph, report.params, config.activation);
        const TrustRanking ranking = rank(initiator, emb.devices);
        table.push_back(ScalingRow{size, ranking.entries.front().first, ranking.entries.front().second});
    }
    return table;
}

Matrix pca_2d(const Matrix& x) {
    const Index n = x.rows();
    if (n < 2) throw std::invalid_argument("pca_2d: need at least 2 rows");
    const Index d = x.cols();
    const Matrix centered = x.rowwise() - x.colwise().mean();
    if (d == 1) {
        Matrix out = Matrix::Zero(n, 2);
        out.col(0) = centered.col(0);
        return out;
    }
    Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Rng rng(0x9c0ffee1);
    Matrix components(d, 2);
    for (int comp = 0; comp < 2; ++comp) {
        Vector v(d);
        for (Index i = 0; i < d; ++i) v(i) = rng.next_double(-1.0, 1.0);
        v.normalize();
        for (int iter = 0; iter < 1000; ++iter) {
            Vector next = cov * v;
            const double norm = next.norm();
            if (norm < 1e-300) break; // deflated to (near) zero: any unit vector works
            next /= norm;
            const double delta = (next - v).norm();
            v = next;
            if (delta < 1e-13) break;
        }
        components.col(comp) = v;
        const double eigenvalue = v.dot(cov * v);
        cov -= eigenvalue * (v * v.transpose());
    }
    return centered * components;
}

} // namespace hypertrust
