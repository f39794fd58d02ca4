#pragma once

#include "fusedrf/field.hpp"
#include "fusedrf/image.hpp"
#include "fusedrf/render.hpp"

#include <cstddef>
#include <vector>

namespace fusedrf {

/// Similarity transform placing a field in the world: x_world = scale * R * x_local + t.
struct Placement {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    double scale = 1.0;

    [[nodiscard]] Vec3 to_world(const Vec3& local) const { return scale * (rotation * local) + translation; }
    [[nodiscard]] bool is_identity() const {
        return rotation == Mat3::Identity() && translation == Vec3::Zero() && scale == 1.0;
    }
};

/// Throws std::invalid_argument unless scale > 0 and rotation is orthonormal with det +1.
void validate_placement(const Placement& placement);

/// Rotation from an axis (need not be unit length) and an angle in degrees.
Mat3 axis_angle(const Vec3& axis, double degrees);

/// x_local = R^T (x_world - t) / scale.
Vec3 to_local(const Placement& placement, const Vec3& world);

/// World-space box enclosing the placed local box.
Aabb world_bounds(const Aabb& local, const Placement& placement);

struct SceneEntry {
    VoxelField field;
    Placement placement;
};

/**
 * Fields placed in a shared world. Composed queries select, per point, the entry with
 * the largest opacity; since every entry is sampled with the same step, that is the
 * entry with the largest world-space density (local density / scale).
 */
class ComposedScene {
public:
    ComposedScene(std::vector<SceneEntry> entries, std::size_t background_index);

    [[nodiscard]] const std::vector<SceneEntry>& entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] std::size_t background_index() const { return background_index_; }
    [[nodiscard]] const SceneEntry& background() const { return entries_[background_index_]; }
    /// Union of the placed entries' world bounds; the shared sampling interval.
    [[nodiscard]] const Aabb& bounds() const { return bounds_; }
    [[nodiscard]] const Aabb& entry_bounds(std::size_t i) const { return entry_bounds_[i]; }

    /// Composed activated sample; see query_composed.
    [[nodiscard]] FieldSample query(const Vec3& p) const;

private:
    friend struct ComposedSample query_composed(const ComposedScene&, const Vec3&);

    std::vector<SceneEntry> entries_;
    std::size_t background_index_;
    Aabb bounds_;
    std::vector<Aabb> entry_bounds_;
};

struct ComposedSample {
    FieldSample sample;
    std::size_t winner = 0;
};

/// Max-alpha selection: the entry with the largest world density wins, ties go to the lowest
/// index. The returned sigma is in world units.
ComposedSample query_composed(const ComposedScene& scene, const Vec3& p_world);

/// Sum of footprint_bytes over all entries: the payload a composed renderer keeps live.
std::size_t payload_bytes(const ComposedScene& scene);

struct RenderStats {
    double wall_ms = 0.0;
    std::size_t payload_bytes = 0;
};

/// Ground-truth render of the composition over the union bounds.
ImageBuffer render_composed(const ComposedScene& scene, const Camera& camera, const RenderConfig& cfg,
                            RenderStats* stats = nullptr);

}  // namespace fusedrf
