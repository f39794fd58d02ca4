#pragma once

#include "fusedrf/composer.hpp"
#include "fusedrf/field.hpp"
#include "fusedrf/image.hpp"
#include "fusedrf/optimizer.hpp"
#include "fusedrf/report.hpp"
#include "fusedrf/sampling.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fusedrf {

/// Distillation knobs. Every field is echoed into training reports.
struct DistillConfig {
    /// Samples whose composed alpha is below this are pruned from the training set.
    double prune_alpha_threshold = 1e-2;
    double lambda_sigma = 1.0;
    double lambda_color = 1.0;
    int supervised_iters = 2000;
    int rgb_iters = 500;
    int batch_rays = 4096;
    double step = 0.125;
    double learning_rate = 1e-1;
    double rgb_learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double epsilon = 1e-8;
    double supervised_epsilon = 1e-15;
    std::uint64_t seed = 0;
    bool jitter = true;
    Vec3 background = Vec3::Zero();
    bool early_termination = true;
    int workers = 0;
};

/// Invalid configuration value; what() names the offending field.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(field) {}
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

void validate_distill_config(const DistillConfig& cfg);

/// Render settings matching the sampling used during distillation.
RenderConfig render_config_for(const DistillConfig& cfg);

struct TrainPoint {
    Vec3 position;
    double delta = 0.0;
    double target_sigma = 0.0;
    Vec3 target_color = Vec3::Zero();
};

struct TrainBatch {
    std::vector<TrainPoint> points;
    /// Samples examined before pruning.
    std::size_t candidates = 0;
};

/**
 * Samples every ray over the scene's union bounds (ray i jittered with ray_seed(seed, i))
 * and keeps the samples whose composed alpha reaches cfg.prune_alpha_threshold. Targets are
 * the winning entry's world density and color.
 */
TrainBatch select_points(const ComposedScene& scene, std::span<const Ray> rays, const DistillConfig& cfg,
                         std::uint64_t seed);

struct LossAndGrad {
    double loss = 0.0;
    SparseGradient gradient;
};

/// Mean over points of lambda_sigma (sigma_S - sigma_T)^2 + lambda_color |c_S - c_T|^2.
LossAndGrad supervised_loss_and_grad(const VoxelField& student, const TrainBatch& batch,
                                     const DistillConfig& cfg);

/**
 * Mean over rays and channels of the squared difference between the student's composited
 * ray colors and the targets. Rays are clipped to the student bounds and jittered with
 * ray_seed(seed, i), so targets traced with the same seed see the same sample positions.
 */
LossAndGrad rgb_loss_and_grad(const VoxelField& student, std::span<const Ray> rays,
                              std::span<const Vec3> targets, const DistillConfig& cfg, std::uint64_t seed);

/// Student grid covering the union bounds, initialized from the background entry. A
/// bit-exact copy when the background is unplaced and already spans the union bounds.
VoxelField init_student(const ComposedScene& scene);

enum class Phase { Supervised, Rgb, Baseline };
const char* phase_name(Phase phase);

struct TrainingHooks {
    /// Calls on_checkpoint before iteration 0, every `checkpoint_every` iterations and after the
    /// last one. 0 disables checkpoints.
    int checkpoint_every = 0;
    /// Elapsed training time excludes time spent in hooks. Return false to stop the phase.
    std::function<bool(Phase, int iteration, double elapsed_ms, const VoxelField&)> on_checkpoint;
    std::function<void(Phase, const VoxelField&)> on_phase_end;
};

struct FuseResult {
    VoxelField student;
    TrainingReport report;
};

/**
 * Distills the composition into one field: background-initialized student, supervised
 * (sigma, color) phase on pruned samples, then RGB pixel-loss phase against the composed
 * renders of the same rays.
 */
FuseResult fuse(const ComposedScene& scene, std::span<const Camera> train_cameras, const DistillConfig& cfg,
                const TrainingHooks& hooks = {});

/// Grid for the retrain-from-images baseline.
struct FitTarget {
    Aabb bounds;
    Resolution resolution{64, 64, 64};
    double init_raw_density = -3.0;
    Vec3 init_raw_color = Vec3::Zero();
};

/// RGB-only training from a constant field; uses cfg.learning_rate, cfg.epsilon and the same
/// ray sampling as fuse(). Images must be pixel-aligned with their cameras.
FuseResult fit_from_images(std::span<const ImageBuffer> images, std::span<const Camera> cameras,
                           const FitTarget& target, const DistillConfig& cfg, int iterations,
                           const TrainingHooks& hooks = {});

/// Appends `config.*` summary entries for every DistillConfig field.
void echo_config(TrainingReport& report, const DistillConfig& cfg);

}  // namespace fusedrf
