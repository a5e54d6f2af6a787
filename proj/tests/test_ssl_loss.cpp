#include "hypertrust/rng.hpp"
#include "hypertrust/ssl_loss.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace hypertrust;

namespace {

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_double(-1.0, 1.0);
    }
    return m;
}

double sample_std(const Eigen::Ref<const Vector>& col) {
    const double mean = col.mean();
    return std::sqrt((col.array() - mean).square().sum() / static_cast<double>(col.size() - 1));
}

} // namespace

TEST_CASE("normalize: two-value column lands on +-1/2") {
    Matrix x(2, 1);
    x << 1.0, 3.0;
    const Matrix norm = normalize_embeddings(x);
    CHECK(norm(0, 0) == doctest::Approx(-0.5).epsilon(1e-7));
    CHECK(norm(1, 0) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("normalize: constant columns collapse to zero") {
    const Matrix x = Matrix::Constant(5, 3, 2.5);
    CHECK(normalize_embeddings(x).isZero());
}

TEST_CASE("normalize rejects single-row input") {
    CHECK_THROWS_AS(normalize_embeddings(Matrix::Ones(1, 4)), std::invalid_argument);
}

TEST_CASE("normalize: column means vanish and stds hit 1/sqrt(n)") {
    Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.next_below(40));
        const Index d = 1 + static_cast<Index>(rng.next_below(8));
        const Matrix norm = normalize_embeddings(random_matrix(n, d, rng));
        const double target = 1.0 / std::sqrt(static_cast<double>(n));
        for (Index j = 0; j < d; ++j) {
            CHECK(std::abs(norm.col(j).mean()) < 1e-8);
            CHECK(std::abs(sample_std(norm.col(j)) - target) < 1e-6);
        }
    }
}

TEST_CASE("normalize: already-normalized input is a fixed point up to eps") {
    Rng rng(13);
    const Matrix once = normalize_embeddings(random_matrix(10, 4, rng));
    const Matrix twice = normalize_embeddings(once);
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("invariance loss basics") {
    Rng rng(14);
    const Matrix x = random_matrix(6, 3, rng);
    CHECK(invariance_loss(x, x) == 0.0);

    Matrix a(1, 2), b(1, 2);
    a << 1, 0;
    b << 0, 1;
    CHECK(invariance_loss(a, b) == 2.0);
    CHECK(invariance_loss(a, b) == invariance_loss(b, a));

    // quadratic in the difference: doubling the gap quadruples the loss
    const Matrix y = random_matrix(6, 3, rng);
    const Matrix far = x + 2.0 * (y - x);
    CHECK(invariance_loss(x, far) == doctest::Approx(4.0 * invariance_loss(x, y)).epsilon(1e-12));

    CHECK_THROWS_AS(invariance_loss(Matrix::Zero(2, 2), Matrix::Zero(3, 2)), std::invalid_argument);
}

TEST_CASE("decorrelation loss basics") {
    // orthonormal columns: gram is the identity, loss 0
    Matrix ortho = Matrix::Zero(4, 2);
    ortho(0, 0) = 1.0;
    ortho(1, 1) = 1.0;
    CHECK(decorrelation_loss(ortho, ortho) == 0.0);

    // single normalized column: x^T x = (n-1)/n, per-view term 1/n^2
    Matrix col(4, 1);
    col << 1.0, 2.0, 3.0, 10.0;
    const Matrix norm = normalize_embeddings(col);
    const double n = 4.0;
    CHECK(decorrelation_loss(norm, norm) == doctest::Approx(2.0 / (n * n)).epsilon(1e-6));

    // d > n: the gram matrix is rank-deficient, loss floor d - n
    Rng rng(15);
    const Matrix wide = normalize_embeddings(random_matrix(2, 3, rng));
    CHECK(decorrelation_loss(wide, wide) >= (3.0 - 2.0));

    CHECK(decorrelation_loss(norm, norm) >= 0.0);
    CHECK_THROWS_AS(decorrelation_loss(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("total loss composes the documented formula") {
    Rng rng(16);
    LossWeights weights; // paper defaults: 0.0002 / 0.0035 / 1 / 0.05

    const EmbeddingPair view{random_matrix(6, 4, rng), random_matrix(5, 4, rng)};
    const std::vector<Matrix> zero_params = {Matrix::Zero(3, 3)};

    const LossBreakdown identical = total_loss(view, view, zero_params, weights);
    CHECK(identical.inv_dev == 0.0);
    CHECK(identical.inv_hyp == 0.0);
    CHECK(identical.reg == 0.0);
    CHECK(identical.total == doctest::Approx(weights.lambda_dev * identical.dec_dev +
                                             weights.lambda1 * weights.lambda_hyp * identical.dec_hyp)
                                 .epsilon(1e-12));

    // random views and parameters: the breakdown invariant holds
    for (int trial = 0; trial < 10; ++trial) {
        const EmbeddingPair v1{random_matrix(6, 4, rng), random_matrix(5, 4, rng)};
        const EmbeddingPair v2{random_matrix(6, 4, rng), random_matrix(5, 4, rng)};
        const std::vector<Matrix> thetas = {random_matrix(3, 4, rng), random_matrix(4, 4, rng)};
        const LossBreakdown got = total_loss(v1, v2, thetas, weights);
        CHECK(got.inv_dev >= 0.0);
        CHECK(got.dec_dev >= 0.0);
        CHECK(got.inv_hyp >= 0.0);
        CHECK(got.dec_hyp >= 0.0);
        CHECK(got.reg == doctest::Approx(thetas[0].squaredNorm() + thetas[1].squaredNorm()));
        const double expect = (got.inv_dev + weights.lambda_dev * got.dec_dev) +
                              weights.lambda1 * (got.inv_hyp + weights.lambda_hyp * got.dec_hyp) +
                              weights.lambda2 * got.reg;
        CHECK(got.total == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("normalization gradients flow through mean and std") {
    Rng rng(17);
    const Matrix x = random_matrix(5, 3, rng);
    const TapeProgram program = [](Tape& t, const std::vector<Value>& p) {
        return t.frobenius_sq(normalize_on_tape(t, p[0]));
    };
    const auto [loss, analytic] = evaluate_with_gradients(program, {x});
    CHECK(std::isfinite(loss));
    const auto fd = finite_difference_gradient(program, {x}, 1e-5);
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x.cols(); ++j) {
            const double scale = std::max({std::abs(analytic[0](i, j)), std::abs(fd[0](i, j)), 1e-6});
            CHECK(std::abs(analytic[0](i, j) - fd[0](i, j)) / scale < 1e-4);
        }
    }
}
