#include "hypertrust/trainer.hpp"

#include "hypertrust/optim.hpp"
#include "hypertrust/rng.hpp"

#include <chrono>
#include <sstream>
#include <stdexcept>

namespace hypertrust {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("config: lr must be > 0");
    if (!(p_a >= 0.0 && p_a <= 1.0)) throw std::invalid_argument("config: p_a outside [0, 1]");
    if (!(p_h >= 0.0 && p_h <= 1.0)) throw std::invalid_argument("config: p_h outside [0, 1]");
    if (layers < 1) throw std::invalid_argument("config: layers must be >= 1");
    if (embedding_dim < 1) throw std::invalid_argument("config: embedding_dim must be >= 1");
    if (weight_decay < 0.0) throw std::invalid_argument("config: weight_decay must be >= 0");
    if (weights.lambda_dev < 0.0 || weights.lambda_hyp < 0.0 || weights.lambda1 < 0.0 || weights.lambda2 < 0.0) {
        throw std::invalid_argument("config: loss weights must be >= 0");
    }
}

TrainReport train(const Hypergraph& g, const TrainConfig& config, const Matrix* features) {
    config.validate();
    if (g.num_devices() < 2) throw std::invalid_argument("train: need at least 2 devices");
    if (g.num_hyperedges() < 2) throw std::invalid_argument("train: need at least 2 hyperedges");

    const Matrix x0 = features ? *features : identity_features(g.num_devices());
    if (x0.rows() != g.num_devices()) throw std::invalid_argument("train: feature rows != device count");

    const auto t_start = std::chrono::steady_clock::now();

    HgnnParams init = HgnnParams::glorot(x0.cols(), config.embedding_dim, config.layers, config.seed);
    std::vector<Matrix> flat = init.flatten();

    AdamState adam;
    adam.lr = config.lr;
    adam.weight_decay = config.weight_decay;

    Rng mask_rng = derive_stream(config.seed, 0x3a5c);

    TrainReport report;
    report.config = config;
    report.history.reserve(static_cast<std::size_t>(config.epochs));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto [view1, view2] = make_views(g, x0, config.p_a, config.p_h, mask_rng);

        Tape tape;
        std::vector<Value> leaves;
        leaves.reserve(flat.size());
        for (const auto& m : flat) leaves.push_back(tape.parameter(m));

        const TapedEmbeddings out1 = forward_on_tape(tape, view1, leaves, config.activation);
        const TapedEmbeddings out2 = forward_on_tape(tape, view2, leaves, config.activation);
        const TapedLoss loss = total_loss_on_tape(tape, out1, out2, leaves, config.weights);
        const LossBreakdown breakdown = extract_breakdown(tape, loss);

        if (!breakdown.finite()) {
            std::ostringstream msg;
            msg << "train: non-finite loss at epoch " << epoch;
            if (!report.history.empty()) {
                msg << "; last finite total = " << report.history.back().total;
            }
            throw std::runtime_error(msg.str());
        }

        tape.backward(loss.total);
        std::vector<Matrix> grads;
        grads.reserve(leaves.size());
        for (const Value v : leaves) grads.push_back(tape.grad(v));

        adam_step(flat, grads, adam);
        report.history.push_back(breakdown);
    }

    report.params = HgnnParams::unflatten(flat);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

EmbeddingPair infer_embeddings(const Hypergraph& g, const HgnnParams& params, Activation act,
                               const Matrix* features) {
    const Matrix x0 = features ? *features : identity_features(g.num_devices());
    return forward(clean_view(g, x0), params, act);
}

} // namespace hypertrust
