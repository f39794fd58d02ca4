#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fusedrf {

/// Gradient over a flat parameter vector: sorted, unique indices with their values.
struct SparseGradient {
    std::vector<std::size_t> indices;
    std::vector<double> values;

    [[nodiscard]] bool empty() const { return indices.empty(); }
    [[nodiscard]] std::size_t size() const { return indices.size(); }
};

/// Dense scratch that collects contributions and emits a SparseGradient. Contributions to the
/// same index are summed in the order they are added.
class GradientAccumulator {
public:
    explicit GradientAccumulator(std::size_t parameter_count);

    void add(std::size_t index, double value) {
        if (!touched_[index]) {
            touched_[index] = 1;
            order_.push_back(index);
        }
        dense_[index] += value;
    }

    [[nodiscard]] std::size_t parameter_count() const { return dense_.size(); }

    /// Returns the accumulated gradient and resets the accumulator.
    SparseGradient finish();

private:
    std::vector<double> dense_;
    std::vector<std::uint8_t> touched_;
    std::vector<std::size_t> order_;
};

struct AdamConfig {
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double epsilon = 1e-8;
};

struct OptimizerState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step_count = 0;

    OptimizerState() = default;
    explicit OptimizerState(std::size_t parameter_count)
        : first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0) {}
};

/**
 * Bias-corrected adaptive-moment update applied lazily: only parameters with a nonzero
 * gradient entry have their moments and values updated; everything else is left exactly
 * as it was. The step counter advances once per call.
 */
void optimizer_step(std::span<double> params, const SparseGradient& gradient, OptimizerState& state,
                    const AdamConfig& cfg);

}  // namespace fusedrf
