#pragma once

#include "hypertrust/augmentation.hpp"
#include "hypertrust/tape.hpp"
#include "hypertrust/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace hypertrust {

enum class Activation { ReLU, Identity };

/// Trainable weights of the two-stage hypergraph network. The same object
/// is applied to both augmented views (parameter sharing).
struct HgnnParams {
    struct Layer {
        Matrix theta_edge;   // d_in x d_out, device -> hyperedge stage
        Matrix theta_device; // d_out x d_out, hyperedge -> device stage
    };
    std::vector<Layer> layers;

    Index input_dim() const { return layers.empty() ? 0 : layers.front().theta_edge.rows(); }
    Index output_dim() const { return layers.empty() ? 0 : layers.back().theta_device.cols(); }

    // Uniform init in [-s, s] with s = 1/sqrt(fan_in + fan_out), seeded.
    static HgnnParams glorot(Index input_dim, Index embedding_dim, int num_layers, std::uint64_t seed);

    // Flat parameter list in layer order: theta_edge, theta_device, ...
    std::vector<Matrix> flatten() const;
    static HgnnParams unflatten(const std::vector<Matrix>& flat);
};

struct EmbeddingPair {
    Matrix devices;    // |A| x d
    Matrix hyperedges; // |E| x d
};

// Per-view propagation constants: edge_from_device = D_e^-1 H^T and
// device_from_edge = D_a^-1 H W, with eps-guarded degree inverses.
struct Propagation {
    Matrix edge_from_device; // |E| x |A|
    Matrix device_from_edge; // |A| x |E|
};

Propagation make_propagation(const AugmentedView& view, double eps = 1e-12);

struct TapedEmbeddings {
    Value devices;
    Value hyperedges;
};

// Records the L-layer forward pass for one view on the tape. params must
// hold the 2L matrices of HgnnParams::flatten(); reusing the same leaves
// for a second view shares parameters between views.
TapedEmbeddings forward_on_tape(Tape& tape, const AugmentedView& view, const std::vector<Value>& params,
                                Activation act = Activation::ReLU, double eps = 1e-12);

// One aggregation layer: x_e = act(D_e^-1 H^T x_a theta_e), then
// x_a' = act(D_a^-1 H W x_e theta_a). Returns (x_e, x_a').
std::pair<Matrix, Matrix> layer_forward(const AugmentedView& view, const Matrix& x_a,
                                        const Matrix& theta_edge, const Matrix& theta_device,
                                        Activation act = Activation::ReLU, double eps = 1e-12);

// Full forward pass without gradient recording.
EmbeddingPair forward(const AugmentedView& view, const HgnnParams& params,
                      Activation act = Activation::ReLU, double eps = 1e-12);

// One-hot identity input features of dimension |A|.
Matrix identity_features(Index num_devices);

} // namespace hypertrust
