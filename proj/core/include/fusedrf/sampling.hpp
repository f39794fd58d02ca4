#pragma once

#include "fusedrf/math.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace fusedrf {

/**
 * Pinhole camera. The camera frame looks down +z with +x right and +y down in the
 * image; `rotation` and `translation` map camera-frame points to world:
 * x_world = rotation * x_cam + translation.
 */
struct Camera {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
};

/// Throws std::invalid_argument if the camera violates its invariants.
void validate_camera(const Camera& camera);

/// Camera at `eye` looking at `target`; `up` picks the roll (image -y maps toward it).
Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal, int width,
               int height);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();
    double t_near = 0.0;
    double t_far = kInfinity;

    [[nodiscard]] Vec3 at(double t) const { return origin + t * direction; }
};

struct SamplePoint {
    Vec3 position;
    double t = 0.0;
    double delta = 0.0;
};

/// Ray through the center of pixel (px, py). Throws std::out_of_range off the image.
Ray pixel_ray(const Camera& camera, int px, int py, double t_near = 0.0, double t_far = kInfinity);

/// Continuous pixel coordinates of a world point (pixel centers at half-integers).
Eigen::Vector2d project(const Camera& camera, const Vec3& world);

struct RayInterval {
    double t_enter = 0.0;
    double t_exit = 0.0;
};

/// Slab test clipped to [ray.t_near, ray.t_far]; nullopt when the ray misses.
std::optional<RayInterval> ray_aabb(const Ray& ray, const Aabb& box);

/// Sample positions along one ray: t_i = t_first + i * step for i < count.
struct SamplePlan {
    double t_first = 0.0;
    double step = 0.0;
    std::size_t count = 0;

    [[nodiscard]] double t(std::size_t i) const { return t_first + static_cast<double>(i) * step; }
};

/// Jitter offset in [0, 1) derived from the seed; 0.5 when jitter is off.
double jitter_offset(bool jitter, std::uint64_t seed);

/// Uniform samples over [ray.t_near, ray.t_far]: floor(length / step) samples at
/// t_near + (i + u) * step, u = 0.5 or a seeded offset in [0, 1).
SamplePlan plan_samples(const Ray& ray, double step, bool jitter, std::uint64_t seed);

/// Materialized plan_samples; every sample carries delta = step.
std::vector<SamplePoint> sample_ray(const Ray& ray, double step, bool jitter, std::uint64_t seed);

}  // namespace fusedrf
