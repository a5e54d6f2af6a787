#include "hypertrust/augmentation.hpp"

#include <stdexcept>

namespace hypertrust {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(what) + ": probability " + std::to_string(p) +
                                    " outside [0, 1]");
    }
}

} // namespace

Matrix mask_devices(const Matrix& x, double p, Rng& rng) {
    check_probability(p, "mask_devices");
    Matrix out = x;
    for (Index i = 0; i < out.rows(); ++i) {
        if (rng.next_bernoulli(p)) out.row(i).setZero();
    }
    return out;
}

Matrix mask_memberships(const Matrix& incidence, double p, Rng& rng) {
    check_probability(p, "mask_memberships");
    Matrix out = incidence;
    for (Index i = 0; i < out.rows(); ++i) {
        for (Index j = 0; j < out.cols(); ++j) {
            if (out(i, j) != 0.0 && rng.next_bernoulli(p)) out(i, j) = 0.0;
        }
    }
    return out;
}

AugmentedView make_view(const Matrix& incidence, const Vector& weights, const Matrix& x,
                        double p_a, double p_h, Rng& rng) {
    AugmentedView view;
    view.features = mask_devices(x, p_a, rng);
    view.incidence = mask_memberships(incidence, p_h, rng);
    view.weights = weights;
    view.device_deg = device_degrees(view.incidence, weights);
    view.hyperedge_deg = hyperedge_degrees(view.incidence);
    return view;
}

std::pair<AugmentedView, AugmentedView> make_views(const Hypergraph& g, const Matrix& x,
                                                   double p_a, double p_h, Rng& rng) {
    if (x.rows() != g.num_devices()) {
        throw std::invalid_argument("make_views: feature rows != device count");
    }
    const Matrix h = g.incidence();
    const Vector w = g.weights();
    AugmentedView first = make_view(h, w, x, p_a, p_h, rng);
    AugmentedView second = make_view(h, w, x, p_a, p_h, rng);
    return {std::move(first), std::move(second)};
}

AugmentedView clean_view(const Hypergraph& g, const Matrix& x) {
    if (x.rows() != g.num_devices()) {
        throw std::invalid_argument("clean_view: feature rows != device count");
    }
    AugmentedView view;
    view.features = x;
    view.incidence = g.incidence();
    view.weights = g.weights();
    view.device_deg = device_degrees(view.incidence, view.weights);
    view.hyperedge_deg = hyperedge_degrees(view.incidence);
    return view;
}

} // namespace hypertrust
