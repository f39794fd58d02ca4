#include <fusedrf/composer.hpp>
#include <fusedrf/distiller.hpp>
#include <fusedrf/scenegen.hpp>

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace fusedrf;

namespace {

std::vector<Vec3> random_points(const Aabb& box, std::size_t n) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(box.min + box.extent().cwiseProduct(Vec3(u(rng), u(rng), u(rng))));
    }
    return out;
}

const DeskScene& stack(int n) {
    static std::vector<DeskScene> cache = [] {
        std::vector<DeskScene> v;
        for (int k = 1; k <= 8; ++k) {
            v.push_back(make_bench_scene("room-stack", k, 0));
        }
        return v;
    }();
    return cache[n - 1];
}

Camera small_camera(const DeskScene& d) {
    Camera c = d.train[0];
    c.width = 64;
    c.height = 64;
    c.cx = 31.5;
    c.cy = 31.5;
    c.fx = c.fy = c.fx * 64.0 / 200.0;
    return c;
}

void BM_QueryPoint(benchmark::State& state) {
    const VoxelField& f = stack(1).scene.entries()[0].field;
    const auto pts = random_points(f.bounds(), 4096);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(query_point(f, pts[i++ & 4095]));
    }
}
BENCHMARK(BM_QueryPoint);

void BM_QueryParamGradient(benchmark::State& state) {
    const VoxelField& f = stack(1).scene.entries()[0].field;
    const auto pts = random_points(f.bounds(), 4096);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(query_param_gradient(f, pts[i++ & 4095]));
    }
}
BENCHMARK(BM_QueryParamGradient);

void BM_QueryComposed(benchmark::State& state) {
    const DeskScene& d = stack(static_cast<int>(state.range(0)));
    const auto pts = random_points(d.scene.bounds(), 4096);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(query_composed(d.scene, pts[i++ & 4095]));
    }
}
BENCHMARK(BM_QueryComposed)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_RenderComposed(benchmark::State& state) {
    const DeskScene& d = stack(static_cast<int>(state.range(0)));
    const Camera cam = small_camera(d);
    RenderConfig rc;
    rc.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_composed(d.scene, cam, rc));
    }
}
BENCHMARK(BM_RenderComposed)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RenderField(benchmark::State& state) {
    const DeskScene& d = stack(1);
    const Camera cam = small_camera(d);
    RenderConfig rc;
    rc.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_image(d.scene.entries()[0].field, cam, rc));
    }
}
BENCHMARK(BM_RenderField)->Unit(benchmark::kMillisecond);

void BM_SupervisedStep(benchmark::State& state) {
    const DeskScene& d = stack(4);
    const VoxelField student = init_student(d.scene);
    DistillConfig cfg;
    cfg.workers = 1;
    std::vector<Ray> rays;
    const Camera& cam = d.train[0];
    for (int y = 0; y < cam.height; y += 8) {
        for (int x = 0; x < cam.width; x += 8) {
            rays.push_back(pixel_ray(cam, x, y));
        }
    }
    for (auto _ : state) {
        const TrainBatch batch = select_points(d.scene, rays, cfg, 3);
        benchmark::DoNotOptimize(supervised_loss_and_grad(student, batch, cfg));
    }
}
BENCHMARK(BM_SupervisedStep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
