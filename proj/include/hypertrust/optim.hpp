#pragma once

#include "hypertrust/types.hpp"

#include <vector>

namespace hypertrust {

// Adam with bias correction and decoupled weight decay. Moment matrices are
// allocated on the first step; the step counter is strictly increasing.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;

    long step_count = 0;
    std::vector<Matrix> m; // first moments, one per parameter
    std::vector<Matrix> v; // second moments
};

// In-place update. Weight decay is applied as theta <- theta - lr*wd*theta
// before the Adam delta. Deterministic: identical inputs give bit-identical
// outputs.
void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads, AdamState& state);

} // namespace hypertrust
