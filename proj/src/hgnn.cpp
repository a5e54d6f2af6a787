#include "hypertrust/hgnn.hpp"

#include "hypertrust/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace hypertrust {

namespace {

Matrix glorot_matrix(Index rows, Index cols, Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_double(-s, s);
    }
    return m;
}

} // namespace

HgnnParams HgnnParams::glorot(Index input_dim, Index embedding_dim, int num_layers, std::uint64_t seed) {
    if (num_layers < 1) throw std::invalid_argument("HgnnParams: need at least one layer");
    if (input_dim < 1 || embedding_dim < 1) throw std::invalid_argument("HgnnParams: dims must be >= 1");
    Rng rng = derive_stream(seed, 0x1717);
    HgnnParams params;
    Index d_in = input_dim;
    for (int l = 0; l < num_layers; ++l) {
        Layer layer;
        layer.theta_edge = glorot_matrix(d_in, embedding_dim, rng);
        layer.theta_device = glorot_matrix(embedding_dim, embedding_dim, rng);
        params.layers.push_back(std::move(layer));
        d_in = embedding_dim;
    }
    return params;
}

std::vector<Matrix> HgnnParams::flatten() const {
    std::vector<Matrix> flat;
    flat.reserve(layers.size() * 2);
    for (const auto& layer : layers) {
        flat.push_back(layer.theta_edge);
        flat.push_back(layer.theta_device);
    }
    return flat;
}

HgnnParams HgnnParams::unflatten(const std::vector<Matrix>& flat) {
    if (flat.empty() || flat.size() % 2 != 0) {
        throw std::invalid_argument("HgnnParams::unflatten: expected an even, non-empty matrix list");
    }
    HgnnParams params;
    for (std::size_t i = 0; i < flat.size(); i += 2) {
        params.layers.push_back(Layer{flat[i], flat[i + 1]});
    }
    return params;
}

Propagation make_propagation(const AugmentedView& view, double eps) {
    Propagation prop;
    const Vector inv_de = diag_inverse(view.hyperedge_deg, eps);
    const Vector inv_da = diag_inverse(view.device_deg, eps);
    prop.edge_from_device = inv_de.asDiagonal() * view.incidence.transpose();
    prop.device_from_edge = inv_da.asDiagonal() * view.incidence * view.weights.asDiagonal();
    return prop;
}

TapedEmbeddings forward_on_tape(Tape& tape, const AugmentedView& view, const std::vector<Value>& params,
                                Activation act, double eps) {
    if (params.empty() || params.size() % 2 != 0) {
        throw std::invalid_argument("forward_on_tape: expected 2 parameter matrices per layer");
    }
    const Propagation prop = make_propagation(view, eps);
    const Value p_edge = tape.constant(prop.edge_from_device);
    const Value p_device = tape.constant(prop.device_from_edge);

    auto activate = [&](Value v) { return act == Activation::ReLU ? tape.relu(v) : v; };

    Value x_a = tape.constant(view.features);
    Value x_e{};
    for (std::size_t l = 0; l < params.size(); l += 2) {
        // x_a * theta first: the |A|-sized product is far cheaper than
        // premultiplying the |E| x |A| propagation into the features.
        x_e = activate(tape.matmul(p_edge, tape.matmul(x_a, params[l])));
        x_a = activate(tape.matmul(tape.matmul(p_device, x_e), params[l + 1]));
    }
    return TapedEmbeddings{x_a, x_e};
}

std::pair<Matrix, Matrix> layer_forward(const AugmentedView& view, const Matrix& x_a,
                                        const Matrix& theta_edge, const Matrix& theta_device,
                                        Activation act, double eps) {
    Tape tape;
    AugmentedView local = view;
    local.features = x_a;
    const std::vector<Value> params = {tape.parameter(theta_edge), tape.parameter(theta_device)};
    const TapedEmbeddings out = forward_on_tape(tape, local, params, act, eps);
    return {tape.value(out.hyperedges), tape.value(out.devices)};
}

EmbeddingPair forward(const AugmentedView& view, const HgnnParams& params, Activation act, double eps) {
    Tape tape;
    std::vector<Value> leaves;
    for (const auto& m : params.flatten()) leaves.push_back(tape.constant(m));
    const TapedEmbeddings out = forward_on_tape(tape, view, leaves, act, eps);
    return EmbeddingPair{tape.value(out.devices), tape.value(out.hyperedges)};
}

Matrix identity_features(Index num_devices) {
    return Matrix::Identity(num_devices, num_devices);
}

} // namespace hypertrust
