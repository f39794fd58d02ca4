#include "fusedrf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fusedrf {

GradientAccumulator::GradientAccumulator(std::size_t parameter_count)
    : dense_(parameter_count, 0.0), touched_(parameter_count, 0) {}

SparseGradient GradientAccumulator::finish() {
    std::sort(order_.begin(), order_.end());
    SparseGradient g;
    g.indices = order_;
    g.values.reserve(order_.size());
    for (std::size_t i : order_) {
        g.values.push_back(dense_[i]);
        dense_[i] = 0.0;
        touched_[i] = 0;
    }
    order_.clear();
    return g;
}

void optimizer_step(std::span<double> params, const SparseGradient& gradient, OptimizerState& state,
                    const AdamConfig& cfg) {
    if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
        throw std::invalid_argument("optimizer_step: state size does not match parameter count");
    }
    if (gradient.indices.size() != gradient.values.size()) {
        throw std::invalid_argument("optimizer_step: malformed sparse gradient");
    }
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(cfg.beta1, t);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t k = 0; k < gradient.indices.size(); ++k) {
        const double g = gradient.values[k];
        if (g == 0.0) {
            continue;
        }
        const std::size_t i = gradient.indices[k];
        if (i >= params.size()) {
            throw std::out_of_range("optimizer_step: gradient index out of range");
        }
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

}  // namespace fusedrf
