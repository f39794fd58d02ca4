#include "fusedrf_cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <iostream>

namespace {

using namespace fusedrf::cli;

void add_common(CLI::App& cmd, CommonOptions& common) {
    cmd.add_option("--config", common.config_path, "key = value config file");
    cmd.add_option("--seed", common.seed, "seed for sampling, jitter and camera rigs");
    cmd.add_option("--workers", common.workers, "parallel width (<= 0: all cores)");
    cmd.add_flag("--no-jitter", common.no_jitter, "midpoint samples instead of jittered ones");
    cmd.add_flag("--oracle", common.oracle, "disable early ray termination");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compose voxel radiance fields and distill them into one field"};
    app.require_subcommand(1);

    CommonOptions common;

    std::string spec;
    fs::path gen_out;
    auto* gen = app.add_subcommand("gen", "rasterize a scene spec (file or built-in name) to field/scene/camera files");
    gen->add_option("spec", spec, "scene spec path or built-in name")->required();
    gen->add_option("out_dir", gen_out)->required();

    fs::path scene_path;
    fs::path cameras_path;
    fs::path render_out;
    std::optional<fs::path> fused_field;
    auto* render = app.add_subcommand("render", "render a composed scene or a fused field");
    render->add_option("scene", scene_path)->required();
    render->add_option("cameras", cameras_path)->required();
    render->add_option("out_dir", render_out)->required();
    render->add_option("--fused", fused_field, "render this field instead of the composition");

    fs::path out_field;
    std::optional<fs::path> fuse_cameras;
    std::optional<fs::path> report_path;
    auto* fuse = app.add_subcommand("fuse", "distill a composed scene into one field");
    fuse->add_option("scene", scene_path)->required();
    fuse->add_option("out_field", out_field)->required();
    fuse->add_option("--cameras", fuse_cameras, "training cameras (default: train_cameras.txt beside the scene)");
    fuse->add_option("--report", report_path, "training report path");

    std::string family;
    std::string n_list;
    fs::path bench_out;
    int frames = 5;
    int repeats = 3;
    auto* bench = app.add_subcommand("bench", "render-time and payload scaling over N-entry scenes");
    bench->add_option("family", family, "room-stack or dup")->required();
    bench->add_option("n_list", n_list, "comma-separated entry counts, e.g. 1,2,4,8")->required();
    bench->add_option("out_report", bench_out)->required();
    bench->add_option("--frames", frames, "timed frames per mode (>= 5 recommended)");
    bench->add_option("--repeats", repeats, "renders per frame; the fastest counts");

    fs::path image_a;
    fs::path image_b;
    auto* psnr = app.add_subcommand("psnr", "PSNR in dB between two f32 image dumps");
    psnr->add_option("a", image_a)->required();
    psnr->add_option("b", image_b)->required();

    for (auto* cmd : {gen, render, fuse, bench, psnr}) {
        add_common(*cmd, common);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        std::cerr << "fusedrf: error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*gen) {
            const auto cfg = effective_config(common);
            const auto out = cmd_gen(spec, gen_out, cfg.seed);
            std::cout << "wrote " << out.field_files.size() << " fields, " << out.scene_file.string() << "\n";
        } else if (*render) {
            const auto cfg = effective_config(common);
            const auto timing = cmd_render(scene_path, cameras_path, fused_field, render_out,
                                           fusedrf::render_config_for(cfg));
            double total = 0.0;
            for (const double ms : timing.frame_ms) {
                total += ms;
            }
            std::printf("%s: %zu views, %.2f ms/frame, payload %zu bytes\n", timing.mode.c_str(),
                        timing.frame_ms.size(), timing.frame_ms.empty() ? 0.0 : total / timing.frame_ms.size(),
                        timing.payload_bytes);
        } else if (*fuse) {
            const auto cfg = effective_config(common);
            const auto report = cmd_fuse(scene_path, out_field, cfg, fuse_cameras, report_path);
            std::printf("supervised %.1f ms, rgb %.1f ms\n", std::stod(report.get("supervised_ms")),
                        std::stod(report.get("rgb_ms")));
        } else if (*bench) {
            BenchOptions options;
            options.frames = frames;
            options.repeats = repeats;
            options.fuse = effective_config(common, bench_default_config());
            const auto report = cmd_bench(family, parse_n_list(n_list), options);
            save_bench_report(bench_out, report);
            write_bench_report(std::cout, report);
        } else if (*psnr) {
            effective_config(common);
            std::cout << cmd_psnr(image_a, image_b) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "fusedrf: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
