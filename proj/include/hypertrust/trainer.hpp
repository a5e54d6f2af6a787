#pragma once

#include "hypertrust/hgnn.hpp"
#include "hypertrust/hypergraph.hpp"
#include "hypertrust/ssl_loss.hpp"
#include "hypertrust/types.hpp"

#include <cstdint>
#include <vector>

namespace hypertrust {

struct TrainConfig {
    int epochs = 200;
    double lr = 1e-3;
    double p_a = 0.5; // device-masking probability
    double p_h = 0.5; // membership-masking probability
    LossWeights weights;
    int layers = 2;
    Index embedding_dim = 512;
    std::uint64_t seed = 1;
    double weight_decay = 1e-5;
    Activation activation = Activation::ReLU;

    void validate() const; // throws std::invalid_argument on the first bad field
};

struct TrainReport {
    std::vector<LossBreakdown> history; // one entry per epoch
    HgnnParams params;
    double seconds = 0.0;
    TrainConfig config;
};

// Full-batch training: per epoch draw two fresh views, forward both through
// the shared parameters, evaluate the total loss, backpropagate, Adam step.
// Deterministic given config.seed. Aborts with the epoch index when the
// loss turns non-finite. An optional feature matrix (|A| x d0) replaces the
// one-hot identity input.
TrainReport train(const Hypergraph& g, const TrainConfig& config, const Matrix* features = nullptr);

// Single forward pass on the un-augmented graph; all trust computation uses
// these embeddings.
EmbeddingPair infer_embeddings(const Hypergraph& g, const HgnnParams& params,
                               Activation act = Activation::ReLU, const Matrix* features = nullptr);

} // namespace hypertrust
