#include "hypertrust/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace hypertrust {

void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads, AdamState& state) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
    }
    if (state.m.empty()) {
        state.m.reserve(params.size());
        state.v.reserve(params.size());
        for (const auto& p : params) {
            state.m.push_back(Matrix::Zero(p.rows(), p.cols()));
            state.v.push_back(Matrix::Zero(p.rows(), p.cols()));
        }
    }
    if (state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step: state was initialized for a different parameter count");
    }

    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& p = params[k];
        const Matrix& g = grads[k];
        if (p.rows() != g.rows() || p.cols() != g.cols()) {
            throw std::invalid_argument("adam_step: shape mismatch between parameter and gradient");
        }
        if (state.weight_decay != 0.0) {
            p -= (state.lr * state.weight_decay) * p;
        }
        state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
        state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g.cwiseProduct(g);
        const Matrix m_hat = state.m[k] / bc1;
        const Matrix v_hat = state.v[k] / bc2;
        p.array() -= state.lr * m_hat.array() / (v_hat.array().sqrt() + state.eps);
    }
}

} // namespace hypertrust
