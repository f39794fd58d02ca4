#include "test_support.hpp"

#include <fusedrf/errors.hpp>
#include <fusedrf/scenegen.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace fusedrf;
using fusedrf::test::rel_err;

namespace {

const Aabb kBox{Vec3::Constant(-2), Vec3::Constant(2)};

std::size_t parse_error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_scene_spec(in, "t.spec");
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("no primitives rasterize to vacuum") {
    const VoxelField f = rasterize_primitives({}, kBox, {5, 6, 7});
    for (std::size_t v = 0; v < f.vertex_count(); ++v) {
        CHECK(f.raw_density(v) == kEmptyRawDensity);
        CHECK(softplus(f.raw_density(v)) < 1e-8);
    }
}

TEST_CASE("signed distances of the primitive shapes") {
    PrimitiveSpec s;
    s.size = Vec3(1.0, 0, 0);
    CHECK(signed_distance(s, Vec3(0, 0, 0)) == doctest::Approx(-1.0));
    CHECK(signed_distance(s, Vec3(0, 3, 0)) == doctest::Approx(2.0));
    s.pose.scale = 2.0;
    CHECK(signed_distance(s, Vec3(0, 3, 0)) == doctest::Approx(1.0));

    PrimitiveSpec b;
    b.shape = Shape::Box;
    b.size = Vec3(1, 2, 3);
    CHECK(signed_distance(b, Vec3(0, 0, 0)) == doctest::Approx(-1.0));
    CHECK(signed_distance(b, Vec3(2, 0, 0)) == doctest::Approx(1.0));
    CHECK(signed_distance(b, Vec3(4, 6, 3)) == doctest::Approx(5.0));

    PrimitiveSpec t;
    t.shape = Shape::Torus;
    t.size = Vec3(2.0, 0.5, 0);
    CHECK(signed_distance(t, Vec3(2, 0, 0)) == doctest::Approx(-0.5));
    CHECK(signed_distance(t, Vec3(0, 0, 0)) == doctest::Approx(1.5));
    t.pose.rotation = axis_angle(Vec3(1, 0, 0), 90.0);
    CHECK(signed_distance(t, Vec3(0, 0, 2)) == doctest::Approx(-0.5));

    CHECK(inside_weight(-1.0, 0.5) == 1.0);
    CHECK(inside_weight(1.0, 0.5) == 0.0);
    CHECK(inside_weight(0.0, 0.5) == doctest::Approx(0.5));
    CHECK(inside_weight(0.0, 0.0) == 1.0);
}

TEST_CASE("a vertex at a sphere center carries the target density") {
    PrimitiveSpec s;
    s.size = Vec3(1.0, 0, 0);
    s.density_value = 7.5;
    s.softness = 0.2;
    const VoxelField f = rasterize_primitives({&s, 1}, kBox, {9, 9, 9});
    CHECK(rel_err(query_point(f, Vec3::Zero()).sigma, 7.5) < 1e-5);
}

TEST_CASE("activation inversion round-trips densities from 1e-3 to 1e3") {
    for (double sigma = 1e-3; sigma <= 1e3 * 1.0001; sigma *= std::sqrt(10.0)) {
        PrimitiveSpec s;
        s.size = Vec3(1.5, 0, 0);
        s.density_value = sigma;
        s.albedo = Vec3(0.05, 0.5, 0.95);
        const VoxelField f = rasterize_primitives({&s, 1}, kBox, {5, 5, 5});
        const FieldSample q = query_point(f, f.vertex_position(2, 2, 2));
        CHECK(rel_err(q.sigma, sigma) < 1e-4);
        CHECK(rel_err(q.color.x(), 0.05) < 1e-4);
        CHECK(rel_err(q.color.z(), 0.95) < 1e-4);
    }
}

TEST_CASE("ball volume from vertex classification") {
    const double radius = 0.9;
    PrimitiveSpec s;
    s.size = Vec3(radius, 0, 0);
    s.density_value = 10.0;
    s.softness = 0.1;
    const VoxelField f = rasterize_primitives({&s, 1}, kBox, {64, 64, 64});
    std::size_t count = 0;
    for (std::size_t v = 0; v < f.vertex_count(); ++v) {
        if (softplus(f.raw_density(v)) > 5.0) {
            ++count;
        }
    }
    const double cell = 4.0 / 63.0;
    const double expected = 4.0 / 3.0 * std::numbers::pi * radius * radius * radius / (cell * cell * cell);
    CHECK(std::abs(count - expected) / expected < 0.05);
}

TEST_CASE("rasterized color follows the nearest primitive") {
    PrimitiveSpec a;
    a.pose.translation = Vec3(-1, 0, 0);
    a.size = Vec3(0.5, 0, 0);
    a.albedo = Vec3(0.9, 0.1, 0.1);
    PrimitiveSpec b = a;
    b.pose.translation = Vec3(1, 0, 0);
    b.albedo = Vec3(0.1, 0.1, 0.9);
    const PrimitiveSpec both[] = {a, b};
    const VoxelField f = rasterize_primitives(both, kBox, {9, 9, 9});
    CHECK((query_point(f, f.vertex_position(1, 4, 4)).color - a.albedo).norm() < 1e-6);
    CHECK((query_point(f, f.vertex_position(7, 4, 4)).color - b.albedo).norm() < 1e-6);
}

TEST_CASE("desk scenes") {
    for (const auto& name : desk_scene_names()) {
        const DeskScene a = make_desk_scene(name, 4);
        const DeskScene b = make_desk_scene(name, 4);
        REQUIRE(a.scene.size() == b.scene.size());
        for (std::size_t i = 0; i < a.scene.size(); ++i) {
            CHECK(a.scene.entries()[i].field == b.scene.entries()[i].field);
            CHECK(a.scene.entries()[i].placement.rotation == b.scene.entries()[i].placement.rotation);
        }
        REQUIRE(a.train.size() == b.train.size());
        for (std::size_t i = 0; i < a.train.size(); ++i) {
            CHECK(a.train[i].rotation == b.train[i].rotation);
            CHECK(a.train[i].translation == b.train[i].translation);
        }
        for (const auto& h : a.heldout) {
            for (const auto& t : a.train) {
                CHECK((h.translation - t.translation).norm() > 1e-3);
            }
        }
    }
    const DeskScene room = make_desk_scene("room-3obj", 0);
    CHECK(room.scene.size() == 3);
    CHECK(room.scene.background_index() == 0);
    CHECK(room.train.size() == 16);
    CHECK(room.heldout.size() == 4);
    CHECK(room.train[0].width == 200);
    int scaled = 0;
    int rotated = 0;
    for (const auto& e : room.scene.entries()) {
        CHECK(e.field.resolution() == Resolution{64, 64, 64});
        scaled += e.placement.scale != 1.0 ? 1 : 0;
        rotated += e.placement.rotation != Mat3::Identity() ? 1 : 0;
    }
    CHECK(scaled == 1);
    CHECK(rotated == 2);
    CHECK_FALSE(make_desk_scene("room-3obj", 1).train[0].translation == room.train[0].translation);
    CHECK_THROWS_AS(make_desk_scene("garden", 0), std::invalid_argument);
}

TEST_CASE("bench scenes") {
    for (int n : {1, 3}) {
        const DeskScene stack = make_bench_scene("room-stack", n, 0);
        CHECK(stack.scene.size() == static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < stack.scene.size(); ++i) {
            CHECK(stack.scene.entry_bounds(i).contains(stack.scene.bounds().center()));
        }
        CHECK(make_bench_scene("dup", n, 0).scene.size() == static_cast<std::size_t>(n));
    }
    CHECK_THROWS(make_bench_scene("dup", 0, 0));
    CHECK_THROWS(make_bench_scene("pile", 2, 0));
}

TEST_CASE("scene spec parsing") {
    const char* text = R"(# two fields
name demo
field a
bounds -1 -1 -1 1 1 1
resolution 5 9 5
sphere center 0.1 0 0 size 0.5 0 0 density 3 albedo 0.2 0.3 0.4
box size 0.2 0.2 0.2 softness 0
end
field b
bounds 0 0 0 2 2 2
resolution 3 3 3
torus size 0.6 0.2 0 axis 1 0 0 angle 90 scale 1.5
end
entry a
entry b translation 1 2 3 axis 0 0 1 angle 45 scale 2
entry b quaternion 1 0 0 0
background 1
rig train 5 heldout 2 radius 9 image 10 8
)";
    std::istringstream in(text);
    const SceneSpec spec = parse_scene_spec(in);
    CHECK(spec.name == "demo");
    REQUIRE(spec.fields.size() == 2);
    CHECK(spec.fields[0].resolution == Resolution{5, 9, 5});
    REQUIRE(spec.fields[0].primitives.size() == 2);
    // Unspecified softness defaults to 1.5 of the smallest cell (0.25 here).
    CHECK(spec.fields[0].primitives[0].softness == doctest::Approx(0.375));
    CHECK(spec.fields[0].primitives[1].softness == 0.0);
    CHECK(spec.fields[1].primitives[0].shape == Shape::Torus);
    CHECK(spec.fields[1].primitives[0].pose.scale == 1.5);
    REQUIRE(spec.entries.size() == 3);
    CHECK(spec.entries[1].placement.translation == Vec3(1, 2, 3));
    CHECK(spec.entries[1].placement.scale == 2.0);
    CHECK((spec.entries[1].placement.rotation - axis_angle(Vec3(0, 0, 1), 45.0)).norm() < 1e-15);
    CHECK(spec.entries[2].placement.rotation == Mat3::Identity());
    CHECK(spec.background_index == 1);
    CHECK(spec.rig.train == 5);
    CHECK(spec.rig.width == 10);
    CHECK(spec.rig.height == 8);
    CHECK(spec.rig.focal == 230.0);

    const DeskScene built = build_scene(spec, 0);
    CHECK(built.field_names == std::vector<std::string>{"a", "b", "b"});
    CHECK(built.train.size() == 5);
}

TEST_CASE("scene spec errors carry the line number") {
    CHECK(parse_error_line("name x\nfield a\nbounds 0 0 0 1 1 1\nbogus 1\nend\nentry a\n") == 4);
    CHECK(parse_error_line("field a\nbounds 0 0 0 1 1\nend\n") == 2);
    CHECK(parse_error_line("field a\nbounds 0 0 0 1 1 1\nsphere size 1 1\nend\n") == 3);
    CHECK(parse_error_line("field a\nbounds 0 0 0 1 1 1\nsphere density -1\nend\n") == 3);
    CHECK(parse_error_line("field a\nbounds 0 0 0 1 1 1\nend\nentry b\n") == 4);
    CHECK(parse_error_line("field a\nbounds 0 0 0 1 1 1\nend\nentry a\nbackground 3\n") == 5);
    CHECK(parse_error_line("field a\nbounds 0 0 0 1 1 1\n") == 2);
    CHECK(parse_error_line("field a\nresolution 1 4 4\nend\n") == 2);
    CHECK(parse_error_line("field a\nend\n") == 2);
    CHECK(parse_error_line("field a\nbounds 0 0 0 1 1 1\nend\nentry a scale 0\n") == 4);
    CHECK(parse_error_line("field a\nbounds 0 0 0 1 1 1\nend\nentry a\nrig focal -3\n") == 5);
}

TEST_CASE("every built-in spec parses") {
    for (const auto& name : desk_scene_names()) {
        std::istringstream in(builtin_scene_spec(name));
        CHECK_NOTHROW(parse_scene_spec(in, name));
    }
    CHECK_THROWS(builtin_scene_spec("nope"));
}
