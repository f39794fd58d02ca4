#include "fusedrf/composer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fusedrf {

void validate_placement(const Placement& placement) {
    if (!(placement.scale > 0.0) || !std::isfinite(placement.scale)) {
        throw std::invalid_argument("placement: scale must be positive");
    }
    const Mat3& r = placement.rotation;
    if (!(r.transpose() * r).isApprox(Mat3::Identity(), 1e-6) || std::abs(r.determinant() - 1.0) > 1e-6) {
        throw std::invalid_argument("placement: rotation must be orthonormal with determinant +1");
    }
}

Mat3 axis_angle(const Vec3& axis, double degrees) {
    if (degrees == 0.0) {
        return Mat3::Identity();
    }
    return Eigen::AngleAxisd(degrees * M_PI / 180.0, axis.normalized()).toRotationMatrix();
}

Vec3 to_local(const Placement& placement, const Vec3& world) {
    return placement.rotation.transpose() * (world - placement.translation) / placement.scale;
}

Aabb world_bounds(const Aabb& local, const Placement& placement) {
    Aabb out{Vec3::Constant(kInfinity), Vec3::Constant(-kInfinity)};
    for (int corner = 0; corner < 8; ++corner) {
        const Vec3 p((corner & 1) ? local.max.x() : local.min.x(), (corner & 2) ? local.max.y() : local.min.y(),
                     (corner & 4) ? local.max.z() : local.min.z());
        const Vec3 w = placement.to_world(p);
        out.min = out.min.cwiseMin(w);
        out.max = out.max.cwiseMax(w);
    }
    return out;
}

ComposedScene::ComposedScene(std::vector<SceneEntry> entries, std::size_t background_index)
    : entries_(std::move(entries)), background_index_(background_index) {
    if (entries_.empty()) {
        throw std::invalid_argument("ComposedScene: at least one entry required");
    }
    if (background_index_ >= entries_.size()) {
        throw std::invalid_argument("ComposedScene: background index out of range");
    }
    for (const auto& e : entries_) {
        validate_placement(e.placement);
        const Aabb wb = world_bounds(e.field.bounds(), e.placement);
        // Padding keeps the rejection test conservative; the exact test happens in local space.
        const Vec3 pad = 1e-9 * wb.extent() + Vec3::Constant(1e-12);
        entry_bounds_.push_back({wb.min - pad, wb.max + pad});
        bounds_ = entry_bounds_.size() == 1 ? wb : bounds_.merged(wb);
    }
}

FieldSample ComposedScene::query(const Vec3& p) const { return query_composed(*this, p).sample; }

ComposedSample query_composed(const ComposedScene& scene, const Vec3& p_world) {
    ComposedSample best;
    bool have = false;
    for (std::size_t i = 0; i < scene.entries_.size(); ++i) {
        FieldSample s;
        if (scene.entry_bounds_[i].contains(p_world)) {
            const SceneEntry& e = scene.entries_[i];
            s = query_point(e.field, to_local(e.placement, p_world));
            s.sigma /= e.placement.scale;
        }
        if (!have || s.sigma > best.sample.sigma) {
            best.sample = s;
            best.winner = i;
            have = true;
        }
    }
    return best;
}

std::size_t payload_bytes(const ComposedScene& scene) {
    std::size_t total = 0;
    for (const auto& e : scene.entries()) {
        total += footprint_bytes(e.field);
    }
    return total;
}

ImageBuffer render_composed(const ComposedScene& scene, const Camera& camera, const RenderConfig& cfg,
                            RenderStats* stats) {
    const auto start = std::chrono::steady_clock::now();
    ImageBuffer image = render_image(scene, camera, cfg);
    if (stats) {
        stats->wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        stats->payload_bytes = payload_bytes(scene);
    }
    return image;
}

}  // namespace fusedrf
