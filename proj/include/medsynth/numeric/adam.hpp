#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/matrix.hpp"

namespace medsynth {

struct AdamHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Accumulators mirror the flattened parameter vector; timestep increases by
// exactly one per step.
struct AdamState {
    Vector first_moment;
    Vector second_moment;
    std::int64_t timestep = 0;
    AdamHyper hyper;

    explicit AdamState(std::size_t param_count, AdamHyper h = {})
        : first_moment(param_count, 0.0), second_moment(param_count, 0.0), hyper(h) {}
};

// Standard Adam update with bias correction, in place.
inline void adam_step(Vector& params, const Vector& grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size())
        throw ShapeError("adam_step: params " + std::to_string(params.size()) +
                         ", grads " + std::to_string(grads.size()) + ", state " +
                         std::to_string(state.first_moment.size()));
    if (!all_finite(grads)) throw NumericError("adam_step: non-finite gradient");

    state.timestep += 1;
    const auto& h = state.hyper;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.timestep));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.timestep));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = h.beta1 * m + (1.0 - h.beta1) * grads[i];
        v = h.beta2 * v + (1.0 - h.beta2) * grads[i] * grads[i];
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        params[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

}  // namespace medsynth
