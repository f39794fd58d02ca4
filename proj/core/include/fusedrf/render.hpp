#pragma once

#include "fusedrf/field.hpp"
#include "fusedrf/image.hpp"
#include "fusedrf/parallel.hpp"
#include "fusedrf/sampling.hpp"

#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

namespace fusedrf {

/// Anything that answers activated (sigma, color) queries in world space over a bounded region.
template <typename S>
concept RadianceSource = requires(const S& source, const Vec3& p) {
    { source.query(p) } -> std::convertible_to<FieldSample>;
    { source.bounds() } -> std::convertible_to<Aabb>;
};

/// Rays stop once transmittance falls below this (unless early termination is off).
inline constexpr double kEarlyStopTransmittance = 1e-4;

struct RenderConfig {
    double step = 0.125;
    Vec3 background = Vec3::Zero();
    double t_near = 0.0;
    double t_far = kInfinity;
    bool jitter = false;
    std::uint64_t seed = 0;
    /// Off reproduces the plain compositing sum over every sample ("oracle" mode).
    bool early_termination = true;
    /// Parallel width; <= 0 uses every hardware thread. Never changes the output.
    int workers = 0;
};

/// Throws std::invalid_argument for a non-positive step or an inverted t range.
void validate_render_config(const RenderConfig& cfg);

struct AlphaColor {
    double alpha = 0.0;
    Vec3 color = Vec3::Zero();
};

/// C = sum_i T_i a_i c_i + T_end * background, T_i = prod_{j<i} (1 - a_j).
Vec3 composite_ray(std::span<const AlphaColor> samples, const Vec3& background);

struct CompositeGradient {
    std::vector<double> d_alpha;
    std::vector<Vec3> d_color;
};

/// Reverse-mode derivatives of composite_ray given dLoss/dC.
CompositeGradient composite_ray_gradient(std::span<const AlphaColor> samples, const Vec3& background,
                                         const Vec3& d_loss_d_color);

/// Seed for the jitter of the ray through a given pixel (or batch slot).
inline std::uint64_t ray_seed(std::uint64_t seed, std::uint64_t index) { return mix_seed(seed, index); }

/// Marches one ray through the source's bounds and composites it.
template <RadianceSource S>
Vec3 trace_ray(const S& source, const Ray& ray, const RenderConfig& cfg, std::uint64_t seed) {
    Ray clipped = ray;
    const auto hit = ray_aabb(ray, source.bounds());
    if (!hit) {
        return cfg.background;
    }
    clipped.t_near = hit->t_enter;
    clipped.t_far = hit->t_exit;
    const SamplePlan plan = plan_samples(clipped, cfg.step, cfg.jitter, seed);

    Vec3 color = Vec3::Zero();
    double transmittance = 1.0;
    for (std::size_t i = 0; i < plan.count; ++i) {
        const FieldSample s = source.query(clipped.at(plan.t(i)));
        if (s.sigma <= 0.0) {
            continue;
        }
        const double alpha = alpha_from_density(s.sigma, plan.step);
        color += (transmittance * alpha) * s.color;
        transmittance *= 1.0 - alpha;
        if (cfg.early_termination && transmittance < kEarlyStopTransmittance) {
            break;
        }
    }
    return color + transmittance * cfg.background;
}

/// Renders every pixel of the camera; rows are processed in parallel with identical results
/// for any worker count.
template <RadianceSource S>
ImageBuffer render_image(const S& source, const Camera& camera, const RenderConfig& cfg) {
    validate_camera(camera);
    validate_render_config(cfg);
    ImageBuffer image(camera.width, camera.height);
    parallel_for(static_cast<std::size_t>(camera.height), cfg.workers, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < camera.width; ++x) {
            const Ray ray = pixel_ray(camera, x, y, cfg.t_near, cfg.t_far);
            const auto index = static_cast<std::uint64_t>(y) * camera.width + x;
            image.set(x, y, trace_ray(source, ray, cfg, ray_seed(cfg.seed, index)));
        }
    });
    return image;
}

/// Traces a batch of rays; ray i uses jitter seed ray_seed(seed, i).
template <RadianceSource S>
std::vector<Vec3> trace_rays(const S& source, std::span<const Ray> rays, const RenderConfig& cfg,
                             std::uint64_t seed) {
    std::vector<Vec3> colors(rays.size());
    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (rays.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, cfg.workers, [&](std::size_t c) {
        const std::size_t end = std::min(rays.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            colors[i] = trace_ray(source, rays[i], cfg, ray_seed(seed, i));
        }
    });
    return colors;
}

}  // namespace fusedrf
