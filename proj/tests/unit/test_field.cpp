#include "test_support.hpp"

#include <fusedrf/field.hpp>
#include <fusedrf/render.hpp>
#include <fusedrf/scenegen.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fusedrf;
using fusedrf::test::rel_err;

namespace {

const Aabb kUnit{Vec3(-1, -1, -1), Vec3(1, 1, 1)};

}  // namespace

TEST_CASE("query outside the bounds is empty and black") {
    VoxelField f(kUnit, {4, 4, 4}, 5.0, Vec3(2, 2, 2));
    for (const Vec3& p : {Vec3(1.5, 0, 0), Vec3(0, -1.01, 0), Vec3(0, 0, 3)}) {
        const FieldSample s = query_point(f, p);
        CHECK(s.sigma == 0.0);
        CHECK(s.color == Vec3::Zero());
    }
}

TEST_CASE("constant raw parameters activate to softplus and sigmoid everywhere inside") {
    const double k = 0.7;
    VoxelField f(kUnit, {5, 3, 4}, k, Vec3(k, -k, 2 * k));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const FieldSample s = query_point(f, test::random_point(kUnit, rng));
        CHECK(s.sigma == doctest::Approx(std::log1p(std::exp(k))).epsilon(1e-14));
        CHECK(s.color.x() == doctest::Approx(1.0 / (1.0 + std::exp(-k))).epsilon(1e-14));
        CHECK(s.color.y() == doctest::Approx(1.0 / (1.0 + std::exp(k))).epsilon(1e-14));
        CHECK(s.color.z() == doctest::Approx(1.0 / (1.0 + std::exp(-2 * k))).epsilon(1e-14));
    }
}

TEST_CASE("a raw density ramp along x is reproduced exactly before activation") {
    const Aabb box{Vec3(0, 0, 0), Vec3(3, 2, 2)};
    VoxelField f(box, {7, 3, 3});
    for (int z = 0; z < 3; ++z) {
        for (int y = 0; y < 3; ++y) {
            for (int x = 0; x < 7; ++x) {
                f.set_raw_density(f.vertex_index(x, y, z), 2.0 - 1.5 * f.vertex_position(x, y, z).x());
            }
        }
    }
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const Vec3 p = test::random_point(box, rng);
        RawSample raw{};
        REQUIRE(interpolate_raw(f, p, raw));
        CHECK(raw[0] == doctest::Approx(2.0 - 1.5 * p.x()).epsilon(1e-12));
    }
}

TEST_CASE("trilinear interpolation matches a nested-lerp oracle and stays within corner values") {
    const Aabb box{Vec3(-2, 0.5, -1), Vec3(1, 2, 3)};
    const VoxelField f = test::random_field(box, {6, 5, 9}, 3);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 500; ++i) {
        const Vec3 p = test::random_point(box, rng);
        RawSample raw{};
        REQUIRE(interpolate_raw(f, p, raw));
        LatticeCell cell;
        REQUIRE(locate_cell(f, p, cell));
        for (int c = 0; c < VoxelField::kChannels; ++c) {
            CHECK(raw[c] == doctest::Approx(test::lerp_oracle(f, p, c)).epsilon(1e-12));
            double lo = 1e300;
            double hi = -1e300;
            for (std::size_t v : cell.vertices) {
                lo = std::min(lo, f.parameters()[v * VoxelField::kChannels + c]);
                hi = std::max(hi, f.parameters()[v * VoxelField::kChannels + c]);
            }
            CHECK(raw[c] >= lo - 1e-12);
            CHECK(raw[c] <= hi + 1e-12);
        }
    }
}

TEST_CASE("activations stay in range for extreme raw values") {
    for (double raw : {-1e4, -50.0, -20.0, 0.0, 20.0, 50.0, 1e4}) {
        VoxelField f(kUnit, {2, 2, 2}, raw, Vec3::Constant(raw));
        const FieldSample s = query_point(f, Vec3(0.1, 0.2, 0.3));
        CHECK(std::isfinite(s.sigma));
        CHECK(s.sigma >= 0.0);
        CHECK((s.color.array() >= 0.0).all());
        CHECK((s.color.array() <= 1.0).all());
    }
    CHECK(softplus(-20.0) < 1e-8);
}

TEST_CASE("queries are pure") {
    const VoxelField f = test::random_field(kUnit, {8, 8, 8}, 5);
    const Vec3 p(0.123, -0.456, 0.789);
    const FieldSample a = query_point(f, p);
    const FieldSample b = query_point(f, p);
    CHECK(a.sigma == b.sigma);
    CHECK(a.color == b.color);
}

TEST_CASE("alpha from density") {
    CHECK(alpha_from_density(0.0, 0.01) == 0.0);
    CHECK(alpha_from_density(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(alpha_from_density(1.0, 1.0) == doctest::Approx(0.632121).epsilon(1e-6));
    for (double delta : {1e-3, 0.125, 1.0, 7.0}) {
        CHECK(alpha_from_density(std::numbers::ln2 / delta, delta) == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("parameter gradient at a vertex and at a cell center") {
    const VoxelField f = test::random_field(kUnit, {5, 5, 5}, 6);
    SUBCASE("vertex carries full weight") {
        const ParamGradient g = query_param_gradient(f, f.vertex_position(1, 2, 3));
        const std::size_t v = f.vertex_index(1, 2, 3);
        int nonzero = 0;
        for (int k = 0; k < 8; ++k) {
            if (g.d_sigma[k] != 0.0) {
                ++nonzero;
                CHECK(g.vertices[k] == v);
                CHECK(g.d_sigma[k] == doctest::Approx(sigmoid(f.raw_density(v))).epsilon(1e-12));
            }
        }
        CHECK(nonzero == 1);
    }
    SUBCASE("cell center splits evenly") {
        const Vec3 p = 0.5 * (f.vertex_position(1, 1, 1) + f.vertex_position(2, 2, 2));
        RawSample raw{};
        REQUIRE(interpolate_raw(f, p, raw));
        const ParamGradient g = query_param_gradient(f, p);
        for (int k = 0; k < 8; ++k) {
            CHECK(g.d_sigma[k] == doctest::Approx(0.125 * sigmoid(raw[0])).epsilon(1e-12));
            for (int c = 0; c < 3; ++c) {
                const double s = sigmoid(raw[c + 1]);
                CHECK(g.d_color[k][c] == doctest::Approx(0.125 * s * (1.0 - s)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("parameter gradient matches central finite differences") {
    const double h = 1e-4;
    int probes = 0;
    int passed = 0;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        VoxelField f = test::random_field(kUnit, {4, 4, 4}, 100 + trial);
        const Vec3 p = test::random_point(kUnit, rng);
        const ParamGradient g = query_param_gradient(f, p);
        const int k = static_cast<int>(rng() % 8);
        const int ch = static_cast<int>(rng() % 4);
        double& param = f.parameters()[g.vertices[k] * VoxelField::kChannels + ch];
        const double saved = param;
        auto value = [&] {
            const FieldSample s = query_point(f, p);
            return ch == 0 ? s.sigma : s.color[ch - 1];
        };
        param = saved + h;
        const double up = value();
        param = saved - h;
        const double down = value();
        param = saved;
        const double fd = (up - down) / (2 * h);
        const double analytic = ch == 0 ? g.d_sigma[k] : g.d_color[k][ch - 1];
        ++probes;
        if (rel_err(analytic, fd) < 1e-4) {
            ++passed;
        }
    }
    CHECK(passed >= probes * 99 / 100);
}

TEST_CASE("parameter gradient outside the bounds is an error") {
    const VoxelField f(kUnit, {3, 3, 3});
    CHECK_THROWS_AS(query_param_gradient(f, Vec3(2, 0, 0)), std::out_of_range);
}

TEST_CASE("crop with an enclosing box is a no-op") {
    const VoxelField f = test::random_field(kUnit, {6, 6, 6}, 8);
    CHECK(crop_field(f, Aabb{Vec3(-2, -2, -2), Vec3(2, 2, 2)}) == f);
    CHECK(crop_field(f, kUnit) == f);
}

TEST_CASE("crop covering no vertex is an error") {
    const VoxelField f(kUnit, {3, 3, 3});
    CHECK_THROWS_AS(crop_field(f, Aabb{Vec3(0.1, 0.1, 0.1), Vec3(0.2, 0.2, 0.2)}), std::invalid_argument);
    CHECK_THROWS_AS(crop_field(f, Aabb{Vec3(5, 5, 5), Vec3(6, 6, 6)}), std::invalid_argument);
}

TEST_CASE("half-space crop of a sphere renders as a hemisphere") {
    const Aabb box{Vec3(-2, -2, -2), Vec3(2, 2, 2)};
    PrimitiveSpec ball;
    ball.shape = Shape::Sphere;
    ball.size = Vec3(1.2, 0, 0);
    ball.density_value = 30.0;
    ball.albedo = Vec3(0.8, 0.4, 0.2);
    ball.softness = 0.1;
    const VoxelField full = rasterize_primitives({&ball, 1}, box, {33, 33, 33});
    const Aabb upper{Vec3(-2, -2, 0), Vec3(2, 2, 2)};
    const VoxelField cropped = crop_field(full, upper);

    // Oracle: the same primitive evaluated analytically, with the lower half left empty.
    VoxelField expected = full;
    for (int z = 0; z < 33; ++z) {
        for (int y = 0; y < 33; ++y) {
            for (int x = 0; x < 33; ++x) {
                const Vec3 p = full.vertex_position(x, y, z);
                const std::size_t v = full.vertex_index(x, y, z);
                if (p.z() < 0.0) {
                    expected.set_raw_density(v, kEmptyRawDensity);
                    CHECK(query_point(cropped, p).sigma < 1e-6);
                } else {
                    // Empty vertices keep the floor density softplus(-20) rather than zero.
                    const double sigma = 30.0 * inside_weight(signed_distance(ball, p), 0.1);
                    CHECK(std::abs(query_point(cropped, p).sigma - sigma) <= 1e-5 * sigma + 1e-8);
                }
            }
        }
    }

    // Side view, z up: the top half of the image shows the cap, the bottom half is empty.
    const Camera cam = look_at(Vec3(0, -6, 0), Vec3::Zero(), Vec3::UnitZ(), 60.0, 48, 48);
    RenderConfig rc;
    rc.step = 0.02;
    const ImageBuffer img = render_image(cropped, cam, rc);
    CHECK(img == render_image(expected, cam, rc));
    CHECK(img.at(24, 14).norm() > 0.3);  // above the equator
    CHECK(img.at(24, 34).norm() < 1e-3);  // below the equator
    CHECK(render_image(full, cam, rc).at(24, 34).norm() > 0.3);
}

TEST_CASE("footprint depends only on resolution") {
    VoxelField a(kUnit, {64, 64, 64});
    CHECK(footprint_bytes(a) == 64u * 64u * 64u * 4u * 4u + kFieldHeaderBytes);
    CHECK(footprint_bytes(a) == 4194304u + kFieldHeaderBytes);
    VoxelField b = test::random_field(Aabb{Vec3(0, 0, 0), Vec3(9, 9, 9)}, {64, 64, 64}, 9);
    CHECK(footprint_bytes(a) == footprint_bytes(b));
    CHECK(footprint_bytes(VoxelField(kUnit, {2, 3, 4})) == 2u * 3u * 4u * 16u + kFieldHeaderBytes);
}

TEST_CASE("field construction rejects invalid shapes") {
    CHECK_THROWS(VoxelField(kUnit, {1, 4, 4}));
    CHECK_THROWS(VoxelField(Aabb{Vec3(0, 0, 0), Vec3(0, 1, 1)}, {4, 4, 4}));
}
