#pragma once

#include "hypertrust/hgnn.hpp"
#include "hypertrust/tape.hpp"
#include "hypertrust/types.hpp"

#include <vector>

namespace hypertrust {

struct LossWeights {
    double lambda_dev = 0.0002; // decorrelation weight, device level
    double lambda_hyp = 0.0035; // decorrelation weight, hyperedge level
    double lambda1 = 1.0;       // hyperedge-level loss weight
    double lambda2 = 0.05;      // parameter regularization weight
};

struct LossBreakdown {
    double inv_dev = 0.0;
    double dec_dev = 0.0;
    double inv_hyp = 0.0;
    double dec_hyp = 0.0;
    double reg = 0.0;
    double total = 0.0;

    bool finite() const;
};

// Column normalization: subtract the column mean and divide by
// (sample std * sqrt(n) + eps). Non-degenerate columns come out with mean 0
// and sample std 1/sqrt(n); constant columns come out all-zero.
Value normalize_on_tape(Tape& tape, Value x, double eps = 1e-8);

// || x1 - x2 ||_F^2
Value invariance_on_tape(Tape& tape, Value x1, Value x2);

// || x1^T x1 - I ||_F^2 + || x2^T x2 - I ||_F^2 with I of size d x d.
Value decorrelation_on_tape(Tape& tape, Value x1, Value x2);

struct TapedLoss {
    Value inv_dev, dec_dev, inv_hyp, dec_hyp, reg, total;
};

// Full training objective over both views:
// total = (inv_dev + lambda_dev*dec_dev)
//       + lambda1*(inv_hyp + lambda_hyp*dec_hyp)
//       + lambda2*reg,    reg = sum of ||theta||_F^2.
TapedLoss total_loss_on_tape(Tape& tape, const TapedEmbeddings& view1, const TapedEmbeddings& view2,
                             const std::vector<Value>& params, const LossWeights& weights);

LossBreakdown extract_breakdown(const Tape& tape, const TapedLoss& loss);

// Plain (no-gradient) counterparts.
Matrix normalize_embeddings(const Matrix& x, double eps = 1e-8);
double invariance_loss(const Matrix& x1, const Matrix& x2);
double decorrelation_loss(const Matrix& x1, const Matrix& x2);
LossBreakdown total_loss(const EmbeddingPair& view1, const EmbeddingPair& view2,
                         const std::vector<Matrix>& thetas, const LossWeights& weights);

} // namespace hypertrust
