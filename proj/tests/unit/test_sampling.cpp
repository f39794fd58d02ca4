#include "test_support.hpp"

#include <fusedrf/sampling.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fusedrf;

namespace {

Camera simple_camera(int w, int h, double f) {
    Camera cam;
    cam.fx = f;
    cam.fy = f;
    cam.cx = 0.5 * w;
    cam.cy = 0.5 * h;
    cam.width = w;
    cam.height = h;
    return cam;
}

}  // namespace

TEST_CASE("principal ray follows the optical axis") {
    const Camera cam = simple_camera(64, 48, 50.0);
    // Pixel (31, 23) has its center at (31.5, 23.5); shift the principal point onto it.
    Camera c = cam;
    c.cx = 31.5;
    c.cy = 23.5;
    const Ray r = pixel_ray(c, 31, 23);
    CHECK(r.direction.x() == doctest::Approx(0.0));
    CHECK(r.direction.y() == doctest::Approx(0.0));
    CHECK(r.direction.z() == doctest::Approx(1.0));
    CHECK(r.origin == Vec3::Zero());
}

TEST_CASE("back-projection one focal length off axis is 45 degrees") {
    Camera cam = simple_camera(100, 100, 100.0);
    cam.cx = -49.5;  // pixel 50's center sits at cx + fx
    cam.cy = 50.5;
    const Ray r = pixel_ray(cam, 50, 50);
    const Vec3 expected = Vec3(1, 0, 1).normalized();
    CHECK((r.direction - expected).norm() < 1e-12);
}

TEST_CASE("ray directions are unit length and pixels outside the image are rejected") {
    const Camera cam = look_at(Vec3(3, -4, 2), Vec3(0, 0, 0), Vec3::UnitZ(), 80.0, 40, 30);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            CHECK(std::abs(pixel_ray(cam, x, y).direction.norm() - 1.0) < 1e-6);
        }
    }
    CHECK_THROWS_AS(pixel_ray(cam, -1, 0), std::out_of_range);
    CHECK_THROWS_AS(pixel_ray(cam, 40, 0), std::out_of_range);
    CHECK_THROWS_AS(pixel_ray(cam, 0, 30), std::out_of_range);
}

TEST_CASE("projecting a point on a pixel ray returns the pixel center") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Camera cam = look_at(Vec3(u(rng), u(rng), u(rng)) + Vec3(20, 0, 0), Vec3(u(rng), u(rng), 0),
                                   Vec3::UnitZ(), 100.0 + 10 * trial, 64, 48);
        const int px = static_cast<int>(rng() % 64);
        const int py = static_cast<int>(rng() % 48);
        const Ray r = pixel_ray(cam, px, py);
        const Eigen::Vector2d back = project(cam, r.at(7.5));
        CHECK(std::abs(back.x() - (px + 0.5)) < 1e-4);
        CHECK(std::abs(back.y() - (py + 0.5)) < 1e-4);
    }
}

TEST_CASE("look_at builds a proper rotation") {
    const Camera cam = look_at(Vec3(10, 2, 3), Vec3(0, 0, -1), Vec3::UnitZ(), 100.0, 32, 32);
    CHECK((cam.rotation.transpose() * cam.rotation - Mat3::Identity()).norm() < 1e-12);
    CHECK(cam.rotation.determinant() == doctest::Approx(1.0));
    CHECK_NOTHROW(validate_camera(cam));
    Camera bad = cam;
    bad.rotation(0, 0) += 0.1;
    CHECK_THROWS(validate_camera(bad));
    bad = cam;
    bad.fx = 0.0;
    CHECK_THROWS(validate_camera(bad));
}

TEST_CASE("slab intersection") {
    const Aabb box{Vec3::Constant(-0.5), Vec3::Constant(0.5)};
    SUBCASE("hand-computed entry and exit") {
        Ray r;
        r.origin = Vec3(-2, 0, 0);
        r.direction = Vec3(1, 0, 0);
        const auto hit = ray_aabb(r, box);
        REQUIRE(hit.has_value());
        CHECK(hit->t_enter == doctest::Approx(1.5));
        CHECK(hit->t_exit == doctest::Approx(2.5));
    }
    SUBCASE("parallel and outside a slab") {
        Ray r;
        r.origin = Vec3(-2, 0.7, 0);
        r.direction = Vec3(1, 0, 0);
        CHECK_FALSE(ray_aabb(r, box).has_value());
    }
    SUBCASE("origin inside clamps to t_near") {
        Ray r;
        r.origin = Vec3::Zero();
        r.direction = Vec3(0, 1, 1).normalized();
        const auto hit = ray_aabb(r, box);
        REQUIRE(hit.has_value());
        CHECK(hit->t_enter == 0.0);
        CHECK(hit->t_exit == doctest::Approx(0.5 * std::sqrt(2.0)));
    }
    SUBCASE("interval limited by t_far") {
        Ray r;
        r.origin = Vec3(-2, 0, 0);
        r.direction = Vec3(1, 0, 0);
        r.t_far = 1.0;
        CHECK_FALSE(ray_aabb(r, box).has_value());
        r.t_far = 2.0;
        CHECK(ray_aabb(r, box)->t_exit == doctest::Approx(2.0));
    }
}

TEST_CASE("uniform samples follow the midpoint formula") {
    Ray r;
    r.t_near = 0.0;
    r.t_far = 1.0;
    const auto samples = sample_ray(r, 0.25, false, 0);
    REQUIRE(samples.size() == 4);
    const double expected[] = {0.125, 0.375, 0.625, 0.875};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(samples[i].t == doctest::Approx(expected[i]).epsilon(1e-15));
        CHECK(samples[i].delta == 0.25);
        CHECK((samples[i].position - r.at(samples[i].t)).norm() < 1e-15);
    }
}

TEST_CASE("short intervals produce no samples") {
    Ray r;
    r.t_near = 2.0;
    r.t_far = 2.2;
    CHECK(sample_ray(r, 0.25, false, 0).empty());
    CHECK(sample_ray(r, 0.25, true, 99).empty());
    CHECK_THROWS(sample_ray(r, 0.0, false, 0));
}

TEST_CASE("jittered sampling is seeded, bounded and covers the interval") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        Ray r;
        r.direction = Vec3(1, 2, 3).normalized();
        r.t_near = u(rng);
        r.t_far = r.t_near + u(rng);
        const double step = 0.05 + 0.01 * (trial % 20);
        const auto a = sample_ray(r, step, true, 1000 + trial);
        const auto b = sample_ray(r, step, true, 1000 + trial);
        REQUIRE(a.size() == b.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].t == b[i].t);
            CHECK(a[i].t >= r.t_near);
            CHECK(a[i].t <= r.t_far);
            sum += a[i].delta;
        }
        CHECK(sum <= (r.t_far - r.t_near) + step + 1e-12);
        CHECK(a.size() == static_cast<std::size_t>(std::floor((r.t_far - r.t_near) / step + 1e-9)));
    }
    CHECK(jitter_offset(false, 5) == 0.5);
    for (std::uint64_t s = 0; s < 100; ++s) {
        const double j = jitter_offset(true, s);
        CHECK(j >= 0.0);
        CHECK(j < 1.0);
    }
}
