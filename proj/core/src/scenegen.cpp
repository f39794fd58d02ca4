#include "fusedrf/scenegen.hpp"

#include "fusedrf/field_io.hpp"
#include "fusedrf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fusedrf {
namespace {

constexpr double kColorLogitClamp = 20.0;

double smoothstep(double e0, double e1, double x) {
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double box_distance(const Vec3& q, const Vec3& half) {
    const Vec3 d = q.cwiseAbs() - half;
    const double outside = d.cwiseMax(0.0).norm();
    const double inside = std::min(d.maxCoeff(), 0.0);
    return outside + inside;
}

const char* const kRoomFields = R"(
field room
bounds -8 -8 -8 8 8 8
resolution 64 64 64
box center 0 0 -6.5 size 7.5 7.5 0.75 density 12 albedo 0.55 0.45 0.35 softness 0.38
box center 5.5 5.5 -2.5 size 0.6 0.6 3.25 density 12 albedo 0.8 0.8 0.75 softness 0.38
box center -5.5 5.5 -2.5 size 0.6 0.6 3.25 density 12 albedo 0.8 0.8 0.75 softness 0.38
box center 5.5 -5.5 -2.5 size 0.6 0.6 3.25 density 12 albedo 0.8 0.8 0.75 softness 0.38
box center -5.5 -5.5 -2.5 size 0.6 0.6 3.25 density 12 albedo 0.8 0.8 0.75 softness 0.38
box center 0 0 -4.5 size 3 2 1.25 density 12 albedo 0.3 0.5 0.7 softness 0.38
end
)";

const char* const kObjectFields = R"(
field torus
bounds -3 -3 -3 3 3 3
resolution 64 64 64
torus size 2 0.7 0 density 12 albedo 0.85 0.3 0.2 softness 0.4
end
field ball
bounds -2 -2 -2 2 2 2
resolution 64 64 64
sphere size 1.5 0 0 density 18 albedo 0.2 0.75 0.3 softness 0.27
end
)";

const char* const kRig = "rig train 16 heldout 4 radius 24 elevation 8 heldout_elevation 6 "
                         "target 0 0 -2 focal 230 image 200 200\n";

}  // namespace

double signed_distance(const PrimitiveSpec& primitive, const Vec3& p) {
    const Vec3 q = to_local(primitive.pose, p);
    double d = 0.0;
    switch (primitive.shape) {
    case Shape::Sphere:
        d = q.norm() - primitive.size.x();
        break;
    case Shape::Box:
        d = box_distance(q, primitive.size);
        break;
    case Shape::Torus: {
        const double ring = std::hypot(q.x(), q.y()) - primitive.size.x();
        d = std::hypot(ring, q.z()) - primitive.size.y();
        break;
    }
    }
    return d * primitive.pose.scale;
}

double inside_weight(double signed_distance, double softness) {
    if (softness <= 0.0) {
        return signed_distance <= 0.0 ? 1.0 : 0.0;
    }
    return 1.0 - smoothstep(-0.5 * softness, 0.5 * softness, signed_distance);
}

VoxelField rasterize_primitives(std::span<const PrimitiveSpec> primitives, const Aabb& bounds,
                                const Resolution& resolution) {
    for (const auto& p : primitives) {
        if (!(p.density_value >= 0.0) || !(p.softness >= 0.0)) {
            throw std::invalid_argument("rasterize_primitives: density and softness must be >= 0");
        }
        validate_placement(p.pose);
    }
    VoxelField field(bounds, resolution, kEmptyRawDensity, Vec3::Zero());
    const auto [nx, ny, nz] = resolution;
    parallel_for(static_cast<std::size_t>(nz), 0, [&](std::size_t zi) {
        const int z = static_cast<int>(zi);
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                const Vec3 pos = field.vertex_position(x, y, z);
                double sigma = 0.0;
                double nearest = std::numeric_limits<double>::infinity();
                Vec3 albedo = Vec3::Zero();
                bool any = false;
                for (const auto& prim : primitives) {
                    const double d = signed_distance(prim, pos);
                    sigma = std::max(sigma, prim.density_value * inside_weight(d, prim.softness));
                    if (d < nearest) {
                        nearest = d;
                        albedo = prim.albedo;
                        any = true;
                    }
                }
                const std::size_t v = field.vertex_index(x, y, z);
                const double raw_sigma = sigma > 0.0 ? softplus_inverse(sigma) : kEmptyRawDensity;
                field.set_raw_density(v, std::max(kEmptyRawDensity, raw_sigma));
                if (any) {
                    Vec3 raw_color;
                    for (int c = 0; c < 3; ++c) {
                        raw_color[c] = std::clamp(logit(albedo[c]), -kColorLogitClamp, kColorLogitClamp);
                    }
                    field.set_raw_color(v, raw_color);
                }
            }
        }
    });
    return quantize_to_stored(field);
}

std::vector<Camera> make_ring_cameras(const CameraRig& rig, std::uint64_t seed, bool heldout) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double train_step = two_pi / rig.train;
    const double phase =
        static_cast<double>(mix_seed(seed, 0) >> 11) * 0x1.0p-53 * train_step;
    const int count = heldout ? rig.heldout : rig.train;
    std::vector<Camera> cams;
    cams.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        // Held-out views sit half a training step off the training angles.
        const double angle = heldout ? phase + 0.5 * train_step + two_pi * i / rig.heldout
                                     : phase + train_step * i;
        const double z = heldout ? rig.heldout_elevation : rig.elevation;
        const Vec3 eye(rig.radius * std::cos(angle), rig.radius * std::sin(angle), z);
        cams.push_back(look_at(eye, rig.target, Vec3::UnitZ(), rig.focal, rig.width, rig.height));
    }
    return cams;
}

DeskScene build_scene(const SceneSpec& spec, std::uint64_t seed) {
    if (spec.entries.empty()) {
        throw std::invalid_argument("scene spec '" + spec.name + "' has no entries");
    }
    std::vector<VoxelField> fields;
    fields.reserve(spec.fields.size());
    for (const auto& f : spec.fields) {
        fields.push_back(rasterize_primitives(f.primitives, f.bounds, f.resolution));
    }
    std::vector<SceneEntry> entries;
    std::vector<std::string> names;
    for (const auto& e : spec.entries) {
        const auto it = std::find_if(spec.fields.begin(), spec.fields.end(),
                                     [&](const FieldSpec& f) { return f.name == e.field; });
        if (it == spec.fields.end()) {
            throw std::invalid_argument("scene spec entry references unknown field '" + e.field + "'");
        }
        entries.push_back({fields[static_cast<std::size_t>(it - spec.fields.begin())], e.placement});
        names.push_back(e.field);
    }
    DeskScene out{ComposedScene(std::move(entries), spec.background_index), std::move(names), {}, {}};
    out.train = make_ring_cameras(spec.rig, seed, false);
    out.heldout = make_ring_cameras(spec.rig, seed, true);
    return out;
}

std::vector<std::string> desk_scene_names() { return {"room-3obj", "room-only", "wall"}; }

std::string builtin_scene_spec(const std::string& name) {
    std::ostringstream s;
    s << "name " << name << "\n";
    if (name == "room-3obj") {
        s << kRoomFields << kObjectFields;
        s << "entry room\n";
        s << "entry torus translation -2.5 1.5 -0.5 axis 1 0 0 angle 60\n";
        s << "entry ball translation 2.5 -1.5 0 axis 0 0 1 angle 30 scale 1.5\n";
    } else if (name == "room-only") {
        s << kRoomFields << "entry room\n";
    } else if (name == "wall") {
        s << "field wall\nbounds -8 -8 -8 8 8 8\nresolution 64 64 64\n"
             "box center 0 0 -2 size 0.5 6 5 density 12 albedo 0.7 0.6 0.5 softness 0.38\n"
             "box center 0 0 -2 size 0.6 1.5 1.5 density 12 albedo 0.2 0.3 0.8 softness 0.38\nend\n"
             "entry wall\n";
    } else {
        throw std::invalid_argument("unknown scene '" + name + "'");
    }
    s << "background 0\n" << kRig;
    return s.str();
}

DeskScene make_desk_scene(const std::string& name, std::uint64_t seed) {
    std::istringstream in(builtin_scene_spec(name));
    return build_scene(parse_scene_spec(in, name), seed);
}

std::vector<std::string> bench_family_names() { return {"room-stack", "dup"}; }

DeskScene make_bench_scene(const std::string& family, int n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("bench scene needs at least one entry");
    }
    std::ostringstream s;
    s << "name " << family << "-" << n << "\n" << kRoomFields;
    if (family == "room-stack") {
        s << "entry room\n";
        for (int i = 1; i < n; ++i) {
            // Small spheres spread over the table top, each in its own full-room field.
            const double angle = 2.0 * std::numbers::pi * (i - 1) / std::max(1, n - 1);
            s << "field obj" << i << "\nbounds -8 -8 -8 8 8 8\nresolution 64 64 64\n"
              << "sphere center " << 1.8 * std::cos(angle) << " " << 1.2 * std::sin(angle)
              << " -2.4 size 0.8 0 0 density 12 albedo " << 0.2 + 0.1 * (i % 7) << " 0.6 "
              << 0.9 - 0.1 * (i % 7) << " softness 0.38\nend\n";
            s << "entry obj" << i << "\n";
        }
    } else if (family == "dup") {
        for (int i = 0; i < n; ++i) {
            s << "entry room\n";
        }
    } else {
        throw std::invalid_argument("unknown bench family '" + family + "'");
    }
    s << "background 0\n" << kRig;
    std::istringstream in(s.str());
    return build_scene(parse_scene_spec(in, family), seed);
}

}  // namespace fusedrf
