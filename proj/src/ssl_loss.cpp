#include "hypertrust/ssl_loss.hpp"

#include <cmath>
#include <stdexcept>

namespace hypertrust {

bool LossBreakdown::finite() const {
    return std::isfinite(inv_dev) && std::isfinite(dec_dev) && std::isfinite(inv_hyp) &&
           std::isfinite(dec_hyp) && std::isfinite(reg) && std::isfinite(total);
}

Value normalize_on_tape(Tape& tape, Value x, double eps) {
    const Index n = tape.value(x).rows();
    if (n < 2) {
        throw std::invalid_argument("normalize: needs at least 2 rows, got " + std::to_string(n));
    }
    const Value mean = tape.colwise_mean(x);
    const Value stddev = tape.colwise_std(x);
    const Value denom = tape.add_scalar(tape.scale(stddev, std::sqrt(static_cast<double>(n))), eps);
    return tape.div_rows(tape.sub_rows(x, mean), denom);
}

Value invariance_on_tape(Tape& tape, Value x1, Value x2) {
    return tape.frobenius_sq(tape.sub(x1, x2));
}

Value decorrelation_on_tape(Tape& tape, Value x1, Value x2) {
    const Index d1 = tape.value(x1).cols();
    const Index d2 = tape.value(x2).cols();
    if (d1 != d2) {
        throw std::invalid_argument("decorrelation: column counts differ (" + std::to_string(d1) +
                                    " vs " + std::to_string(d2) + ")");
    }
    const Value identity = tape.constant(Matrix::Identity(d1, d1));
    const Value g1 = tape.frobenius_sq(tape.sub(tape.matmul(tape.transpose(x1), x1), identity));
    const Value g2 = tape.frobenius_sq(tape.sub(tape.matmul(tape.transpose(x2), x2), identity));
    return tape.add(g1, g2);
}

TapedLoss total_loss_on_tape(Tape& tape, const TapedEmbeddings& view1, const TapedEmbeddings& view2,
                             const std::vector<Value>& params, const LossWeights& weights) {
    const Value dev1 = normalize_on_tape(tape, view1.devices);
    const Value dev2 = normalize_on_tape(tape, view2.devices);
    const Value hyp1 = normalize_on_tape(tape, view1.hyperedges);
    const Value hyp2 = normalize_on_tape(tape, view2.hyperedges);

    TapedLoss loss;
    loss.inv_dev = invariance_on_tape(tape, dev1, dev2);
    loss.dec_dev = decorrelation_on_tape(tape, dev1, dev2);
    loss.inv_hyp = invariance_on_tape(tape, hyp1, hyp2);
    loss.dec_hyp = decorrelation_on_tape(tape, hyp1, hyp2);

    if (params.empty()) throw std::invalid_argument("total_loss: empty parameter list");
    Value reg = tape.frobenius_sq(params[0]);
    for (std::size_t i = 1; i < params.size(); ++i) {
        reg = tape.add(reg, tape.frobenius_sq(params[i]));
    }
    loss.reg = reg;

    const Value dev_level = tape.add(loss.inv_dev, tape.scale(loss.dec_dev, weights.lambda_dev));
    const Value hyp_level = tape.add(loss.inv_hyp, tape.scale(loss.dec_hyp, weights.lambda_hyp));
    loss.total = tape.add(tape.add(dev_level, tape.scale(hyp_level, weights.lambda1)),
                          tape.scale(loss.reg, weights.lambda2));
    return loss;
}

LossBreakdown extract_breakdown(const Tape& tape, const TapedLoss& loss) {
    LossBreakdown out;
    out.inv_dev = tape.scalar(loss.inv_dev);
    out.dec_dev = tape.scalar(loss.dec_dev);
    out.inv_hyp = tape.scalar(loss.inv_hyp);
    out.dec_hyp = tape.scalar(loss.dec_hyp);
    out.reg = tape.scalar(loss.reg);
    out.total = tape.scalar(loss.total);
    return out;
}

Matrix normalize_embeddings(const Matrix& x, double eps) {
    Tape tape;
    return tape.value(normalize_on_tape(tape, tape.constant(x), eps));
}

double invariance_loss(const Matrix& x1, const Matrix& x2) {
    Tape tape;
    return tape.scalar(invariance_on_tape(tape, tape.constant(x1), tape.constant(x2)));
}

double decorrelation_loss(const Matrix& x1, const Matrix& x2) {
    Tape tape;
    return tape.scalar(decorrelation_on_tape(tape, tape.constant(x1), tape.constant(x2)));
}

LossBreakdown total_loss(const EmbeddingPair& view1, const EmbeddingPair& view2,
                         const std::vector<Matrix>& thetas, const LossWeights& weights) {
    Tape tape;
    TapedEmbeddings v1{tape.constant(view1.devices), tape.constant(view1.hyperedges)};
    TapedEmbeddings v2{tape.constant(view2.devices), tape.constant(view2.hyperedges)};
    std::vector<Value> params;
    params.reserve(thetas.size());
    for (const auto& t : thetas) params.push_back(tape.constant(t));
    const TapedLoss loss = total_loss_on_tape(tape, v1, v2, params, weights);
    return extract_breakdown(tape, loss);
}

} // namespace hypertrust
