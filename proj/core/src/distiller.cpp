#include "fusedrf/distiller.hpp"

#include "fusedrf/parallel.hpp"
#include "fusedrf/render.hpp"
#include "fusedrf/text_format.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace fusedrf {

namespace {

using Clock = std::chrono::steady_clock;

struct Contribution {
    std::size_t index;
    double value;
};

struct ChunkResult {
    double loss = 0.0;
    std::size_t samples = 0;
    std::vector<Contribution> contributions;
};

/**
 * Evaluates `compute(item, result)` over fixed-size chunks of items, in waves of one chunk per
 * worker, and folds the chunk results in chunk order. Chunk boundaries do not depend on the
 * worker count, so the summation order (and therefore every bit of the result) does not either.
 */
template <typename Compute>
std::pair<double, std::size_t> reduce_chunks(std::size_t items, std::size_t chunk_size, int workers,
                                             GradientAccumulator& acc, Compute&& compute) {
    const std::size_t chunks = (items + chunk_size - 1) / chunk_size;
    const auto width = static_cast<std::size_t>(resolve_workers(workers));
    std::vector<ChunkResult> wave(std::min(width, std::max<std::size_t>(chunks, 1)));
    double loss = 0.0;
    std::size_t samples = 0;
    for (std::size_t first = 0; first < chunks; first += wave.size()) {
        const std::size_t count = std::min(wave.size(), chunks - first);
        parallel_for(count, workers, [&](std::size_t w) {
            ChunkResult& r = wave[w];
            r.loss = 0.0;
            r.samples = 0;
            r.contributions.clear();
            const std::size_t begin = (first + w) * chunk_size;
            const std::size_t end = std::min(items, begin + chunk_size);
            for (std::size_t i = begin; i < end; ++i) {
                compute(i, r);
            }
        });
        for (std::size_t w = 0; w < count; ++w) {
            loss += wave[w].loss;
            samples += wave[w].samples;
            for (const auto& c : wave[w].contributions) {
                acc.add(c.index, c.value);
            }
        }
    }
    return {loss, samples};
}

void push_param_gradient(const ParamGradient& g, double d_sigma, const Vec3& d_color, ChunkResult& r) {
    for (int corner = 0; corner < 8; ++corner) {
        const std::size_t base = g.vertices[corner] * VoxelField::kChannels;
        const double ws = d_sigma * g.d_sigma[corner];
        if (ws != 0.0) {
            r.contributions.push_back({base, ws});
        }
        for (int k = 0; k < 3; ++k) {
            const double wc = d_color[k] * g.d_color[corner][k];
            if (wc != 0.0) {
                r.contributions.push_back({base + 1 + k, wc});
            }
        }
    }
}

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

/// Stopwatch that can be paused while hooks run.
class PhaseTimer {
public:
    PhaseTimer() : start_(Clock::now()) {}
    [[nodiscard]] double ms() const { return elapsed_ms(start_) - paused_ms_; }
    template <typename F>
    auto excluded(F&& f) {
        const auto t0 = Clock::now();
        struct Guard {
            PhaseTimer& timer;
            Clock::time_point t0;
            ~Guard() { timer.paused_ms_ += elapsed_ms(t0); }
        } guard{*this, t0};
        return f();
    }

private:
    Clock::time_point start_;
    double paused_ms_ = 0.0;
};

std::vector<Ray> draw_rays(std::span<const Camera> cameras, int count, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick_camera(0, cameras.size() - 1);
    std::vector<Ray> rays;
    rays.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const Camera& cam = cameras[pick_camera(rng)];
        std::uniform_int_distribution<int> px(0, cam.width - 1);
        std::uniform_int_distribution<int> py(0, cam.height - 1);
        const int x = px(rng);
        const int y = py(rng);
        rays.push_back(pixel_ray(cam, x, y));
    }
    return rays;
}

AdamConfig adam(const DistillConfig& cfg, double learning_rate, double epsilon) {
    return {learning_rate, cfg.beta1, cfg.beta2, epsilon};
}

/// Shared optimization loop. `make_step(iteration)` returns the loss/gradient for one iteration.
template <typename MakeStep>
void run_phase(Phase phase, int iterations, VoxelField& field, const AdamConfig& adam_cfg,
               const TrainingHooks& hooks, TrainingReport& report, MakeStep&& make_step) {
    OptimizerState state(field.parameter_count());
    PhaseTimer timer;
    const char* name = phase_name(phase);
    auto checkpoint = [&](int it) {
        if (!hooks.on_checkpoint) {
            return true;
        }
        const double ms = timer.ms();
        return timer.excluded([&] { return hooks.on_checkpoint(phase, it, ms, field); });
    };
    const bool checkpoints = hooks.checkpoint_every > 0;
    int it = 0;
    for (; it < iterations; ++it) {
        if (checkpoints && it % hooks.checkpoint_every == 0 && !checkpoint(it)) {
            break;
        }
        auto [loss, samples, gradient] = make_step(it);
        optimizer_step(field.parameters(), gradient, state, adam_cfg);
        report.iterations.push_back({name, it, loss, samples, timer.ms()});
    }
    if (checkpoints && it == iterations) {
        checkpoint(it);
    }
    report.set(std::string(name) + "_ms", timer.ms());
    report.set(std::string(name) + "_iterations", static_cast<double>(it));
    if (!report.iterations.empty() && report.iterations.back().phase == name) {
        report.set(std::string(name) + "_final_loss", report.iterations.back().loss);
    }
    if (hooks.on_phase_end) {
        hooks.on_phase_end(phase, field);
    }
}

struct StepResult {
    double loss;
    std::size_t samples;
    SparseGradient gradient;
};

constexpr std::size_t kPointChunk = 1024;
constexpr std::size_t kRayChunk = 32;

}  // namespace

const char* phase_name(Phase phase) {
    switch (phase) {
        case Phase::Supervised:
            return "supervised";
        case Phase::Rgb:
            return "rgb";
        case Phase::Baseline:
            return "baseline";
    }
    return "unknown";
}

void validate_distill_config(const DistillConfig& cfg) {
    if (!(cfg.prune_alpha_threshold >= 0.0 && cfg.prune_alpha_threshold < 1.0)) {
        throw ConfigError("prune_alpha_threshold", "must be in [0, 1)");
    }
    if (!(cfg.lambda_sigma >= 0.0)) {
        throw ConfigError("lambda_sigma", "must be >= 0");
    }
    if (!(cfg.lambda_color >= 0.0)) {
        throw ConfigError("lambda_color", "must be >= 0");
    }
    if (cfg.supervised_iters < 0) {
        throw ConfigError("supervised_iters", "must be >= 0");
    }
    if (cfg.rgb_iters < 0) {
        throw ConfigError("rgb_iters", "must be >= 0");
    }
    if (cfg.batch_rays <= 0) {
        throw ConfigError("batch_rays", "must be > 0");
    }
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) {
        throw ConfigError("step", "must be a positive finite number");
    }
    if (!(cfg.learning_rate > 0.0)) {
        throw ConfigError("learning_rate", "must be > 0");
    }
    if (!(cfg.rgb_learning_rate > 0.0)) {
        throw ConfigError("rgb_learning_rate", "must be > 0");
    }
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0)) {
        throw ConfigError("beta1", "must be in [0, 1)");
    }
    if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
        throw ConfigError("beta2", "must be in [0, 1)");
    }
    if (!(cfg.epsilon > 0.0)) {
        throw ConfigError("epsilon", "must be > 0");
    }
    if (!(cfg.supervised_epsilon > 0.0)) {
        throw ConfigError("supervised_epsilon", "must be > 0");
    }
    if ((cfg.background.array() < 0.0).any() || (cfg.background.array() > 1.0).any()) {
        throw ConfigError("background", "channels must be in [0, 1]");
    }
}

RenderConfig render_config_for(const DistillConfig& cfg) {
    RenderConfig r;
    r.step = cfg.step;
    r.background = cfg.background;
    r.jitter = cfg.jitter;
    r.seed = cfg.seed;
    r.early_termination = cfg.early_termination;
    r.workers = cfg.workers;
    return r;
}

TrainBatch select_points(const ComposedScene& scene, std::span<const Ray> rays, const DistillConfig& cfg,
                         std::uint64_t seed) {
    const std::size_t chunks = (rays.size() + kRayChunk - 1) / kRayChunk;
    std::vector<std::vector<TrainPoint>> kept(chunks);
    std::vector<std::size_t> examined(chunks, 0);
    parallel_for(chunks, cfg.workers, [&](std::size_t c) {
        const std::size_t end = std::min(rays.size(), (c + 1) * kRayChunk);
        for (std::size_t i = c * kRayChunk; i < end; ++i) {
            const auto hit = ray_aabb(rays[i], scene.bounds());
            if (!hit) {
                continue;
            }
            Ray clipped = rays[i];
            clipped.t_near = hit->t_enter;
            clipped.t_far = hit->t_exit;
            const SamplePlan plan = plan_samples(clipped, cfg.step, cfg.jitter, ray_seed(seed, i));
            examined[c] += plan.count;
            for (std::size_t s = 0; s < plan.count; ++s) {
                const Vec3 p = clipped.at(plan.t(s));
                const ComposedSample cs = query_composed(scene, p);
                if (alpha_from_density(cs.sample.sigma, plan.step) >= cfg.prune_alpha_threshold) {
                    kept[c].push_back({p, plan.step, cs.sample.sigma, cs.sample.color});
                }
            }
        }
    });
    TrainBatch batch;
    for (std::size_t c = 0; c < chunks; ++c) {
        batch.points.insert(batch.points.end(), kept[c].begin(), kept[c].end());
        batch.candidates += examined[c];
    }
    return batch;
}

namespace {

LossAndGrad supervised_impl(const VoxelField& student, const TrainBatch& batch, const DistillConfig& cfg,
                            GradientAccumulator& acc) {
    if (batch.points.empty()) {
        return {0.0, acc.finish()};
    }
    const double inv_n = 1.0 / static_cast<double>(batch.points.size());
    const double loss =
        reduce_chunks(batch.points.size(), kPointChunk, cfg.workers, acc, [&](std::size_t i, ChunkResult& r) {
            const TrainPoint& pt = batch.points[i];
            const ParamGradient g = query_param_gradient(student, pt.position);
            const double ds = g.value.sigma - pt.target_sigma;
            const Vec3 dc = g.value.color - pt.target_color;
            r.loss += cfg.lambda_sigma * ds * ds + cfg.lambda_color * dc.squaredNorm();
            r.samples += 1;
            push_param_gradient(g, 2.0 * cfg.lambda_sigma * ds * inv_n, (2.0 * cfg.lambda_color * inv_n) * dc, r);
        }).first;
    return {loss * inv_n, acc.finish()};
}

struct RayWork {
    std::vector<ParamGradient> grads;
    std::vector<AlphaColor> samples;
};

LossAndGrad rgb_impl(const VoxelField& student, std::span<const Ray> rays, std::span<const Vec3> targets,
                     const DistillConfig& cfg, std::uint64_t seed, GradientAccumulator& acc,
                     std::size_t* sample_count) {
    if (rays.size() != targets.size()) {
        throw std::invalid_argument("rgb_loss_and_grad: rays and targets differ in length");
    }
    if (rays.empty()) {
        return {0.0, acc.finish()};
    }
    const double scale = 1.0 / (3.0 * static_cast<double>(rays.size()));
    const auto [loss, samples] = reduce_chunks(rays.size(), kRayChunk, cfg.workers, acc, [&](std::size_t i,
                                                                                          ChunkResult& r) {
        thread_local RayWork work;
        work.grads.clear();
        work.samples.clear();
        Vec3 color = cfg.background;
        if (const auto hit = ray_aabb(rays[i], student.bounds())) {
            Ray clipped = rays[i];
            clipped.t_near = hit->t_enter;
            clipped.t_far = hit->t_exit;
            const SamplePlan plan = plan_samples(clipped, cfg.step, cfg.jitter, ray_seed(seed, i));
            double transmittance = 1.0;
            for (std::size_t s = 0; s < plan.count; ++s) {
                const ParamGradient g = query_param_gradient(student, clipped.at(plan.t(s)));
                const double alpha = alpha_from_density(g.value.sigma, plan.step);
                work.grads.push_back(g);
                work.samples.push_back({alpha, g.value.color});
                transmittance *= 1.0 - alpha;
                if (cfg.early_termination && transmittance < kEarlyStopTransmittance) {
                    break;
                }
            }
            color = composite_ray(work.samples, cfg.background);
        }
        const Vec3 residual = color - targets[i];
        r.loss += residual.squaredNorm();
        if (work.samples.empty()) {
            return;
        }
        const CompositeGradient cg = composite_ray_gradient(work.samples, cfg.background, (2.0 * scale) * residual);
        for (std::size_t s = 0; s < work.samples.size(); ++s) {
            // d alpha / d sigma = delta * (1 - alpha)
            const double d_sigma = cg.d_alpha[s] * cfg.step * (1.0 - work.samples[s].alpha);
            push_param_gradient(work.grads[s], d_sigma, cg.d_color[s], r);
        }
        r.samples += work.samples.size();
    });
    if (sample_count) {
        *sample_count = samples;
    }
    return {loss * scale, acc.finish()};
}

}  // namespace

LossAndGrad supervised_loss_and_grad(const VoxelField& student, const TrainBatch& batch,
                                     const DistillConfig& cfg) {
    GradientAccumulator acc(student.parameter_count());
    return supervised_impl(student, batch, cfg, acc);
}

LossAndGrad rgb_loss_and_grad(const VoxelField& student, std::span<const Ray> rays,
                              std::span<const Vec3> targets, const DistillConfig& cfg, std::uint64_t seed) {
    GradientAccumulator acc(student.parameter_count());
    return rgb_impl(student, rays, targets, cfg, seed, acc, nullptr);
}

VoxelField init_student(const ComposedScene& scene) {
    const SceneEntry& bg = scene.background();
    const Aabb& union_box = scene.bounds();
    if (bg.placement.is_identity() && bg.field.bounds() == union_box) {
        return bg.field;
    }
    const double voxel = bg.field.cell_size().minCoeff() * bg.placement.scale;
    Resolution res{};
    for (int a = 0; a < 3; ++a) {
        const double cells = std::ceil(union_box.extent()[a] / voxel - 1e-6);
        res[a] = std::max(2, static_cast<int>(cells) + 1);
    }
    VoxelField student(union_box, res, kEmptyRawDensity, Vec3::Zero());
    const double scale = bg.placement.scale;
    for (int z = 0; z < res[2]; ++z) {
        for (int y = 0; y < res[1]; ++y) {
            for (int x = 0; x < res[0]; ++x) {
                RawSample raw;
                if (!interpolate_raw(bg.field, to_local(bg.placement, student.vertex_position(x, y, z)), raw)) {
                    continue;
                }
                const std::size_t v = student.vertex_index(x, y, z);
                double density = raw[0];
                if (scale != 1.0) {
                    density = std::max(kEmptyRawDensity, softplus_inverse(softplus(raw[0]) / scale));
                }
                student.set_raw_density(v, density);
                student.set_raw_color(v, Vec3(raw[1], raw[2], raw[3]));
            }
        }
    }
    return student;
}

FuseResult fuse(const ComposedScene& scene, std::span<const Camera> train_cameras, const DistillConfig& cfg,
                const TrainingHooks& hooks) {
    validate_distill_config(cfg);
    if (train_cameras.empty() && (cfg.supervised_iters > 0 || cfg.rgb_iters > 0)) {
        throw std::invalid_argument("fuse: at least one training camera is required");
    }
    for (const auto& cam : train_cameras) {
        validate_camera(cam);
    }

    const auto init_start = Clock::now();
    FuseResult result{init_student(scene), {}};
    result.report.set("init_ms", elapsed_ms(init_start));
    VoxelField& student = result.student;
    GradientAccumulator acc(student.parameter_count());

    std::mt19937_64 supervised_rng(mix_seed(cfg.seed, 1));
    run_phase(Phase::Supervised, cfg.supervised_iters, student, adam(cfg, cfg.learning_rate, cfg.supervised_epsilon),
              hooks, result.report, [&](int it) {
                  const auto rays = draw_rays(train_cameras, cfg.batch_rays, supervised_rng);
                  const TrainBatch batch = select_points(scene, rays, cfg, mix_seed(cfg.seed, 1000 + it));
                  LossAndGrad lg = supervised_impl(student, batch, cfg, acc);
                  return StepResult{lg.loss, batch.points.size(), std::move(lg.gradient)};
              });

    std::mt19937_64 rgb_rng(mix_seed(cfg.seed, 2));
    const RenderConfig teacher_cfg = render_config_for(cfg);
    run_phase(Phase::Rgb, cfg.rgb_iters, student, adam(cfg, cfg.rgb_learning_rate, cfg.epsilon), hooks,
              result.report, [&](int it) {
                  const auto rays = draw_rays(train_cameras, cfg.batch_rays, rgb_rng);
                  const std::uint64_t seed = mix_seed(cfg.seed, 1'000'000 + it);
                  const auto targets = trace_rays(scene, std::span<const Ray>(rays), teacher_cfg, seed);
                  std::size_t samples = 0;
                  LossAndGrad lg = rgb_impl(student, rays, targets, cfg, seed, acc, &samples);
                  return StepResult{lg.loss, samples, std::move(lg.gradient)};
              });

    result.report.set("student_resolution", std::to_string(student.resolution()[0]) + "x" +
                                                std::to_string(student.resolution()[1]) + "x" +
                                                std::to_string(student.resolution()[2]));
    result.report.set("student_payload_bytes", static_cast<double>(footprint_bytes(student)));
    result.report.set("scene_entries", static_cast<double>(scene.size()));
    echo_config(result.report, cfg);
    return result;
}

FuseResult fit_from_images(std::span<const ImageBuffer> images, std::span<const Camera> cameras,
                           const FitTarget& target, const DistillConfig& cfg, int iterations,
                           const TrainingHooks& hooks) {
    validate_distill_config(cfg);
    if (images.size() != cameras.size()) {
        throw std::invalid_argument("fit_from_images: one image per camera required");
    }
    if (iterations > 0 && images.empty()) {
        throw std::invalid_argument("fit_from_images: no training images");
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        validate_camera(cameras[i]);
        if (images[i].width != cameras[i].width || images[i].height != cameras[i].height) {
            throw std::invalid_argument("fit_from_images: image " + std::to_string(i) +
                                        " does not match its camera size");
        }
    }

    FuseResult result{VoxelField(target.bounds, target.resolution, target.init_raw_density, target.init_raw_color),
                      {}};
    VoxelField& field = result.student;
    GradientAccumulator acc(field.parameter_count());
    std::mt19937_64 rng(mix_seed(cfg.seed, 3));
    std::uniform_int_distribution<std::size_t> pick_image(0, images.empty() ? 0 : images.size() - 1);

    run_phase(Phase::Baseline, iterations, field, adam(cfg, cfg.learning_rate, cfg.epsilon), hooks,
              result.report, [&](int it) {
                  std::vector<Ray> rays;
                  std::vector<Vec3> targets;
                  rays.reserve(static_cast<std::size_t>(cfg.batch_rays));
                  targets.reserve(static_cast<std::size_t>(cfg.batch_rays));
                  for (int r = 0; r < cfg.batch_rays; ++r) {
                      const std::size_t k = pick_image(rng);
                      std::uniform_int_distribution<int> px(0, images[k].width - 1);
                      std::uniform_int_distribution<int> py(0, images[k].height - 1);
                      const int x = px(rng);
                      const int y = py(rng);
                      rays.push_back(pixel_ray(cameras[k], x, y));
                      targets.push_back(images[k].at(x, y));
                  }
                  std::size_t samples = 0;
                  LossAndGrad lg = rgb_impl(field, rays, targets, cfg, mix_seed(cfg.seed, 2'000'000 + it), acc,
                                            &samples);
                  return StepResult{lg.loss, samples, std::move(lg.gradient)};
              });
    echo_config(result.report, cfg);
    return result;
}

void echo_config(TrainingReport& report, const DistillConfig& cfg) {
    using text::format_double;
    report.set("config.prune_alpha_threshold", cfg.prune_alpha_threshold);
    report.set("config.lambda_sigma", cfg.lambda_sigma);
    report.set("config.lambda_color", cfg.lambda_color);
    report.set("config.supervised_iters", static_cast<double>(cfg.supervised_iters));
    report.set("config.rgb_iters", static_cast<double>(cfg.rgb_iters));
    report.set("config.batch_rays", static_cast<double>(cfg.batch_rays));
    report.set("config.step", cfg.step);
    report.set("config.learning_rate", cfg.learning_rate);
    report.set("config.rgb_learning_rate", cfg.rgb_learning_rate);
    report.set("config.beta1", cfg.beta1);
    report.set("config.beta2", cfg.beta2);
    report.set("config.epsilon", cfg.epsilon);
    report.set("config.supervised_epsilon", cfg.supervised_epsilon);
    report.set("config.seed", std::to_string(cfg.seed));
    report.set("config.jitter", cfg.jitter ? "true" : "false");
    report.set("config.background", format_double(cfg.background.x()) + "," + format_double(cfg.background.y()) +
                                        "," + format_double(cfg.background.z()));
    report.set("config.early_termination", cfg.early_termination ? "true" : "false");
    report.set("config.workers", std::to_string(cfg.workers));
}

}  // namespace fusedrf
