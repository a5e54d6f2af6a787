#include "hypertrust/data_io.hpp"
#include "hypertrust/evaluation.hpp"
#include "hypertrust/rng.hpp"
#include "hypertrust/trust.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

using namespace hypertrust;

namespace {

// Independent O(n^2) silhouette oracle, written directly from the
// per-point definition.
double brute_silhouette(const Matrix& points, const std::vector<int>& labels, DistanceMetric metric) {
    const Index n = points.rows();
    auto dist = [&](Index i, Index j) {
        if (metric == DistanceMetric::Euclidean) return (points.row(i) - points.row(j)).norm();
        const double ni = points.row(i).norm();
        const double nj = points.row(j).norm();
        if (ni == 0.0 || nj == 0.0) return 1.0;
        return 1.0 - points.row(i).dot(points.row(j)) / (ni * nj);
    };
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        double a_sum = 0.0;
        int a_count = 0;
        std::map<int, std::pair<double, int>> others;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)]) {
                a_sum += dist(i, j);
                ++a_count;
            } else {
                auto& acc = others[labels[static_cast<std::size_t>(j)]];
                acc.first += dist(i, j);
                acc.second += 1;
            }
        }
        const double a = a_sum / a_count;
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, acc] : others) b = std::min(b, acc.first / acc.second);
        total += std::max(a, b) > 0.0 ? (b - a) / std::max(a, b) : 0.0;
    }
    return total / static_cast<double>(n);
}

Matrix random_points(Index n, Index d, Rng& rng) {
    Matrix m(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) m(i, j) = rng.next_double(-1.0, 1.0);
    }
    return m;
}

} // namespace

TEST_CASE("silhouette separates two tight far-apart pairs") {
    Matrix pts(4, 2);
    pts << 0.0, 0.0,
           0.01, 0.0,
           10.0, 10.0,
           10.0, 10.01;
    const std::vector<int> labels = {0, 0, 1, 1};
    const double ss = silhouette_score(pts, labels, DistanceMetric::Euclidean);
    CHECK(ss > 0.9);
    CHECK(ss == doctest::Approx(brute_silhouette(pts, labels, DistanceMetric::Euclidean)).epsilon(1e-12));
}

TEST_CASE("silhouette near zero for random labels on one blob") {
    Rng rng(50);
    int inside = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const Matrix pts = random_points(20, 3, rng);
        std::vector<int> labels(20);
        int ones = 0;
        for (auto& l : labels) {
            l = static_cast<int>(rng.next_below(2));
            ones += l;
        }
        if (ones < 2 || ones > 18) continue; // need 2 per class
        const double ss = silhouette_score(pts, labels, DistanceMetric::Euclidean);
        if (std::abs(ss) < 0.2) ++inside;
    }
    CHECK(inside >= 90);
}

TEST_CASE("silhouette matches the brute-force oracle on random instances") {
    Rng rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 4 + static_cast<Index>(rng.next_below(46));
        const Matrix pts = random_points(n, 4, rng);
        std::vector<int> labels(static_cast<std::size_t>(n));
        const int classes = 2 + static_cast<int>(rng.next_below(3));
        bool valid = false;
        while (!valid) {
            std::vector<int> counts(static_cast<std::size_t>(classes), 0);
            for (auto& l : labels) {
                l = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
                counts[static_cast<std::size_t>(l)]++;
            }
            valid = true;
            for (int c : counts) valid = valid && c >= 2;
        }
        const auto metric = trial % 2 == 0 ? DistanceMetric::Cosine : DistanceMetric::Euclidean;
        const double got = silhouette_score(pts, labels, metric);
        const double expect = brute_silhouette(pts, labels, metric);
        CHECK(std::abs(got - expect) <= 1e-12);
        CHECK(got >= -1.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("silhouette is invariant to global scaling under cosine") {
    Rng rng(52);
    const Matrix pts = random_points(12, 5, rng);
    std::vector<int> labels = {0, 0, 0, 0, 1, 1, 1, 1, 0, 1, 0, 1};
    const double base = silhouette_score(pts, labels, DistanceMetric::Cosine);
    const double scaled = silhouette_score((7.5 * pts).eval(), labels, DistanceMetric::Cosine);
    CHECK(base == doctest::Approx(scaled).epsilon(1e-12));
}

TEST_CASE("silhouette rejects undersized classes") {
    const Matrix pts = Matrix::Random(4, 2);
    CHECK_THROWS_AS(silhouette_score(pts, {0, 0, 0, 1}, DistanceMetric::Cosine), std::invalid_argument);
    CHECK_THROWS_AS(silhouette_score(pts, {0, 0, 0, 0}, DistanceMetric::Cosine), std::invalid_argument);
    CHECK_THROWS_AS(silhouette_score(pts, {0, 0, 1}, DistanceMetric::Cosine), std::invalid_argument);
}

TEST_CASE("trust_cluster_ss is high when the trusted group copies the initiator") {
    const Index n = 12;
    const int k = 3;
    Matrix emb = Matrix::Zero(n, n);
    // initiator 0 and its top-k are identical rays; the rest are mutually
    // orthogonal and orthogonal to the trusted group
    for (Index i = 0; i <= k; ++i) emb.row(i) << Matrix::Zero(1, n).eval();
    for (Index i = 0; i <= k; ++i) emb(i, 0) = 1.0;
    for (Index i = k + 1; i < n; ++i) emb(i, i) = 1.0;
    const double ss = trust_cluster_ss(emb, 0, k);
    CHECK(ss > 0.6);

    Rng rng(53);
    const double random_ss = trust_cluster_ss(random_points(40, 16, rng), 0, 8);
    CHECK(std::abs(random_ss) < 0.3);

    CHECK_THROWS_AS(trust_cluster_ss(emb, 0, static_cast<int>(n) - 1), std::invalid_argument);
}

TEST_CASE("trust distribution bins non-initiator devices") {
    // two other devices at trust exactly 0.85 -> single bin
    Matrix emb(3, 2);
    const double angle = std::acos(0.85);
    emb << 1, 0,
           std::cos(angle), std::sin(angle),
           std::cos(angle), std::sin(angle);
    const TrustHistogram hist = trust_distribution(emb, 0, {0.8, 0.9, 1.0});
    REQUIRE(hist.proportion.size() == 2);
    CHECK(hist.proportion[0] == 1.0);
    CHECK(hist.proportion[1] == 0.0);

    Rng rng(54);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix pts = random_points(15, 4, rng);
        std::vector<double> edges;
        for (int b = -10; b <= 10; ++b) edges.push_back(b / 10.0);
        const TrustHistogram h = trust_distribution(pts, 3, edges);
        double sum = 0.0;
        for (double p : h.proportion) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(trust_distribution(emb, 0, {0.9, 0.8}), std::invalid_argument);
    CHECK_THROWS_AS(trust_distribution(emb, 0, {0.5}), std::invalid_argument);
}

TEST_CASE("sensitivity sweep: single cell equals a standalone run") {
    const Dataset ds = generate_synthetic(16, 21);
    const Hypergraph g = build_all(ds, BuildConfig{0, 1});

    SweepConfig sweep;
    sweep.train.epochs = 5;
    sweep.train.embedding_dim = 8;
    sweep.train.seed = 9;
    sweep.initiator = 2;
    sweep.top_k = 3;
    sweep.workers = 1;

    const SensitivityGrid grid = sensitivity_sweep(g, sweep, {0.5}, {0.5});
    REQUIRE(grid.ss.rows() == 1);
    REQUIRE(grid.ss.cols() == 1);

    TrainConfig direct = sweep.train;
    direct.p_a = 0.5;
    direct.p_h = 0.5;
    direct.seed = sweep.train.seed; // cell 0 offset is 0
    const TrainReport report = train(g, direct);
    const EmbeddingPair emb = infer_embeddings(g, report.params);
    CHECK(grid.ss(0, 0) == trust_cluster_ss(emb.devices, 2, 3));
}

TEST_CASE("sensitivity sweep cells are independent of worker scheduling") {
    const Dataset ds = generate_synthetic(16, 22);
    const Hypergraph g = build_all(ds, BuildConfig{0, 1});

    SweepConfig sweep;
    sweep.train.epochs = 3;
    sweep.train.embedding_dim = 8;
    sweep.train.seed = 4;
    sweep.initiator = 1;
    sweep.top_k = 3;

    sweep.workers = 1;
    const SensitivityGrid serial = sensitivity_sweep(g, sweep, {0.1, 0.5, 0.9}, {0.1, 0.5, 0.9});
    sweep.workers = 3;
    const SensitivityGrid parallel = sensitivity_sweep(g, sweep, {0.1, 0.5, 0.9}, {0.1, 0.5, 0.9});

    REQUIRE(serial.ss.rows() == 3);
    REQUIRE(serial.ss.cols() == 3);
    CHECK(serial.ss == parallel.ss);
    CHECK(serial.seeds == parallel.seeds);
    // distinct per-cell seeds
    std::set<std::uint64_t> distinct(serial.seeds.begin(), serial.seeds.end());
    CHECK(distinct.size() == 9);
}

TEST_CASE("node-count experiment uses stable prefixes and is deterministic") {
    const Dataset ds = generate_synthetic(20, 23);
    TrainConfig config;
    config.epochs = 4;
    config.embedding_dim = 8;
    config.seed = 6;
    const BuildConfig build{0, 1};

    const auto table = node_count_experiment(ds, {1, 10, 20}, config, build, 2);
    REQUIRE(table.size() == 2); // size 1 skipped
    CHECK(table[0].size == 10);
    CHECK(table[1].size == 20);

    // full-size row equals the standard pipeline
    const Hypergraph g = build_all(ds, build);
    const TrainReport report = train(g, config);
    const TrustRanking ranking = rank(2, infer_embeddings(g, report.params).devices);
    CHECK(table[1].selected == ranking.entries.front().first);
    CHECK(table[1].trust_value == ranking.entries.front().second);

    const auto again = node_count_experiment(ds, {1, 10, 20}, config, build, 2);
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(table[i].selected == again[i].selected);
        CHECK(table[i].trust_value == again[i].trust_value);
    }

    CHECK_THROWS_AS(node_count_experiment(ds, {25}, config, build, 2), std::invalid_argument);
    CHECK_THROWS_AS(node_count_experiment(ds, {5}, config, build, 10), std::invalid_argument);
}

TEST_CASE("pca_2d behaves like a rigid projection") {
    Rng rng(55);

    // already 2-D and centered: distances are preserved (rotation)
    Matrix flat = random_points(20, 2, rng);
    flat.rowwise() -= flat.colwise().mean();
    const Matrix proj = pca_2d(flat);
    REQUIRE(proj.rows() == 20);
    REQUIRE(proj.cols() == 2);
    for (Index i = 0; i < 20; ++i) {
        for (Index j = i + 1; j < 20; ++j) {
            const double before = (flat.row(i) - flat.row(j)).norm();
            const double after = (proj.row(i) - proj.row(j)).norm();
            CHECK(std::abs(before - after) < 1e-8);
        }
    }

    // rank-1 data: second component carries (almost) no variance
    Matrix rank1(15, 4);
    const Matrix direction = random_points(1, 4, rng);
    for (Index i = 0; i < 15; ++i) rank1.row(i) = rng.next_double(-2.0, 2.0) * direction.row(0);
    const Matrix r1 = pca_2d(rank1);
    const double var0 = r1.col(0).squaredNorm();
    const double var1 = r1.col(1).squaredNorm();
    CHECK(var1 <= 1e-16 * std::max(1.0, var0));

    CHECK_THROWS_AS(pca_2d(Matrix::Ones(1, 3)), std::invalid_argument);
}
