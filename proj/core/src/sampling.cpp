#include "fusedrf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fusedrf {

void validate_camera(const Camera& camera) {
    if (!(camera.fx > 0.0) || !(camera.fy > 0.0)) {
        throw std::invalid_argument("camera: focal lengths must be positive");
    }
    if (camera.width <= 0 || camera.height <= 0) {
        throw std::invalid_argument("camera: width and height must be positive");
    }
    const Mat3& r = camera.rotation;
    if (!(r.transpose() * r).isApprox(Mat3::Identity(), 1e-6) || std::abs(r.determinant() - 1.0) > 1e-6) {
        throw std::invalid_argument("camera: rotation must be orthonormal with determinant +1");
    }
}

Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal, int width,
               int height) {
    const Vec3 forward = (target - eye).normalized();
    const Vec3 right = forward.cross(up).normalized();
    const Vec3 down = forward.cross(right);
    Camera cam;
    cam.fx = focal;
    cam.fy = focal;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.width = width;
    cam.height = height;
    cam.rotation.col(0) = right;
    cam.rotation.col(1) = down;
    cam.rotation.col(2) = forward;
    cam.translation = eye;
    return cam;
}

Ray pixel_ray(const Camera& camera, int px, int py, double t_near, double t_far) {
    if (px < 0 || py < 0 || px >= camera.width || py >= camera.height) {
        throw std::out_of_range("pixel_ray: pixel outside image");
    }
    const Vec3 d_cam((px + 0.5 - camera.cx) / camera.fx, (py + 0.5 - camera.cy) / camera.fy, 1.0);
    Ray ray;
    ray.origin = camera.translation;
    ray.direction = (camera.rotation * d_cam).normalized();
    ray.t_near = t_near;
    ray.t_far = t_far;
    return ray;
}

Eigen::Vector2d project(const Camera& camera, const Vec3& world) {
    const Vec3 p = camera.rotation.transpose() * (world - camera.translation);
    return {camera.fx * p.x() / p.z() + camera.cx, camera.fy * p.y() / p.z() + camera.cy};
}

std::optional<RayInterval> ray_aabb(const Ray& ray, const Aabb& box) {
    double t0 = ray.t_near;
    double t1 = ray.t_far;
    for (int a = 0; a < 3; ++a) {
        const double o = ray.origin[a];
        const double d = ray.direction[a];
        if (d == 0.0) {
            if (o < box.min[a] || o > box.max[a]) {
                return std::nullopt;
            }
            continue;
        }
        const double inv = 1.0 / d;
        double ta = (box.min[a] - o) * inv;
        double tb = (box.max[a] - o) * inv;
        if (ta > tb) {
            std::swap(ta, tb);
        }
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) {
            return std::nullopt;
        }
    }
    return RayInterval{t0, t1};
}

double jitter_offset(bool jitter, std::uint64_t seed) {
    if (!jitter) {
        return 0.5;
    }
    std::minstd_rand engine(static_cast<std::uint_fast32_t>(mix_seed(seed, 0x6a09e667ULL) % 2147483646ULL + 1));
    return std::generate_canonical<double, 32>(engine);
}

SamplePlan plan_samples(const Ray& ray, double step, bool jitter, std::uint64_t seed) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("sample_ray: step must be positive");
    }
    SamplePlan plan;
    plan.step = step;
    const double length = ray.t_far - ray.t_near;
    if (!(length >= step) || !std::isfinite(length)) {
        return plan;
    }
    // The tiny bias keeps exact multiples (length == k * step) from losing a sample.
    plan.count = static_cast<std::size_t>(std::floor(length / step + 1e-9));
    plan.t_first = ray.t_near + jitter_offset(jitter, seed) * step;
    return plan;
}

std::vector<SamplePoint> sample_ray(const Ray& ray, double step, bool jitter, std::uint64_t seed) {
    const SamplePlan plan = plan_samples(ray, step, jitter, seed);
    std::vector<SamplePoint> samples;
    samples.reserve(plan.count);
    for (std::size_t i = 0; i < plan.count; ++i) {
        const double t = plan.t(i);
        samples.push_back({ray.at(t), t, step});
    }
    return samples;
}

}  // namespace fusedrf
