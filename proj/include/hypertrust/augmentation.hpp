#pragma once

#include "hypertrust/hypergraph.hpp"
#include "hypertrust/rng.hpp"
#include "hypertrust/types.hpp"

#include <utility>

namespace hypertrust {

// One stochastically masked copy of the relationship hypergraph: zeroed
// feature rows, dropped memberships, and degrees recomputed from the masked
// incidence (weights are untouched).
struct AugmentedView {
    Matrix features;        // |A| x d0, rows zeroed with probability p_a
    Matrix incidence;       // |A| x |E|, 1-entries dropped with probability p_h
    Vector weights;         // |E|, copied from the graph
    Vector device_deg;      // recomputed: incidence * weights
    Vector hyperedge_deg;   // recomputed: column sums
};

// Zeroes each feature row independently with probability p.
Matrix mask_devices(const Matrix& x, double p, Rng& rng);

// Flips each 1-entry of the incidence to 0 independently with probability p.
Matrix mask_memberships(const Matrix& incidence, double p, Rng& rng);

AugmentedView make_view(const Matrix& incidence, const Vector& weights, const Matrix& x,
                        double p_a, double p_h, Rng& rng);

// Two independent draws from the same generator stream.
std::pair<AugmentedView, AugmentedView> make_views(const Hypergraph& g, const Matrix& x,
                                                   double p_a, double p_h, Rng& rng);

// The p = 0 view: original features and incidence, degrees from the clean
// graph. Used for inference and evaluation.
AugmentedView clean_view(const Hypergraph& g, const Matrix& x);

} // namespace hypertrust
