#pragma once

#include "fusedrf/composer.hpp"
#include "fusedrf/field.hpp"
#include "fusedrf/sampling.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fusedrf {

enum class Shape { Sphere, Box, Torus };

/**
 * Analytic primitive. `size` is interpreted per shape: sphere radius in x; box half extents;
 * torus major radius in x and tube radius in y (ring in the local xy plane). The pose places
 * the primitive's local frame in the field's frame.
 */
struct PrimitiveSpec {
    Shape shape = Shape::Sphere;
    Placement pose;
    Vec3 size = Vec3::Ones();
    double density_value = 1.0;
    Vec3 albedo = Vec3::Constant(0.5);
    double softness = 0.0;
};

/// Signed distance (negative inside) from p, in the field's frame, to the primitive surface.
double signed_distance(const PrimitiveSpec& primitive, const Vec3& p);

/// Activated-density profile across the surface: density_value deep inside, 0 outside,
/// smoothstep over a band of width `softness` centered on the surface.
double inside_weight(double signed_distance, double softness);

/**
 * Bakes primitives into a field. Density is the max over primitives of their profile, color
 * is the albedo of the primitive with the smallest signed distance. Activations are inverted
 * (raw density floored at kEmptyRawDensity, color logits clamped to +-20) and parameters are
 * rounded to stored f32 precision.
 */
VoxelField rasterize_primitives(std::span<const PrimitiveSpec> primitives, const Aabb& bounds,
                                const Resolution& resolution);

/// Ring of look-at cameras; held-out views sit between training views.
struct CameraRig {
    int train = 16;
    int heldout = 4;
    double radius = 24.0;
    double elevation = 8.0;
    double heldout_elevation = 6.0;
    Vec3 target = Vec3(0.0, 0.0, -2.0);
    double focal = 230.0;
    int width = 200;
    int height = 200;
};

struct FieldSpec {
    std::string name;
    Aabb bounds;
    Resolution resolution{64, 64, 64};
    std::vector<PrimitiveSpec> primitives;
};

struct EntrySpec {
    std::string field;
    Placement placement;
};

/**
 * Text scene description consumed by `fusedrf gen`:
 *
 *   name <id>
 *   field <name>                       # opens a field block
 *   bounds <minx miny minz maxx maxy maxz>
 *   resolution <nx ny nz>
 *   sphere|box|torus [center x y z] [size a b c] [axis x y z] [angle deg] [scale s]
 *                    [density d] [albedo r g b] [softness w]
 *   end                                # closes the field block
 *   entry <field-name> [translation x y z] [axis x y z] [angle deg] [scale s]
 *   background <entry-index>
 *   rig [train n] [heldout n] [radius r] [elevation z] [heldout_elevation z]
 *       [target x y z] [focal f] [image w h]
 *
 * Primitive defaults: center 0, size 1, no rotation, scale 1, density 1, albedo 0.5, and a
 * softness of 1.5 cell widths of the enclosing field.
 */
struct SceneSpec {
    std::string name;
    std::vector<FieldSpec> fields;
    std::vector<EntrySpec> entries;
    std::size_t background_index = 0;
    CameraRig rig;
};

SceneSpec parse_scene_spec(std::istream& in, const std::string& source = "<spec>");

struct DeskScene {
    ComposedScene scene;
    std::vector<std::string> field_names;  // parallel to scene.entries()
    std::vector<Camera> train;
    std::vector<Camera> heldout;
};

/// Rasterizes the scene spec's fields and builds its rig; the seed rotates the ring phase.
DeskScene build_scene(const SceneSpec& spec, std::uint64_t seed);

std::vector<Camera> make_ring_cameras(const CameraRig& rig, std::uint64_t seed, bool heldout);

/// Built-in scene names: "room-3obj", "room-only", "wall".
std::vector<std::string> desk_scene_names();
/// Spec text of a built-in scene; throws std::invalid_argument for unknown names.
std::string builtin_scene_spec(const std::string& name);

DeskScene make_desk_scene(const std::string& name, std::uint64_t seed);

/**
 * Scaling-benchmark scenes with n entries that all span the room bounds.
 *   "room-stack": the room plus n-1 full-extent fields, each holding one small object.
 *   "dup": n copies of the room at identical placements.
 * Cameras come from the room-3obj rig.
 */
DeskScene make_bench_scene(const std::string& family, int n, std::uint64_t seed);
std::vector<std::string> bench_family_names();

}  // namespace fusedrf
