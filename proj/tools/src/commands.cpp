#include "fusedrf_cli/commands.hpp"

#include <fusedrf/camera_io.hpp>
#include <fusedrf/composer.hpp>
#include <fusedrf/errors.hpp>
#include <fusedrf/field_io.hpp>
#include <fusedrf/scene_io.hpp>
#include <fusedrf/scenegen.hpp>
#include <fusedrf/text_format.hpp>

#include <sys/resource.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fusedrf::cli {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(key, "cannot parse '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") {
        return true;
    }
    if (value == "false" || value == "0") {
        return false;
    }
    throw ConfigError(key, "expected true or false, got '" + value + "'");
}

using Setter = std::function<void(DistillConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto real = [&t](const char* name, double DistillConfig::*member) {
            t[name] = [member](DistillConfig& c, const std::string& k, const std::string& v) {
                c.*member = parse_number<double>(k, v);
            };
        };
        auto integer = [&t](const char* name, int DistillConfig::*member) {
            t[name] = [member](DistillConfig& c, const std::string& k, const std::string& v) {
                c.*member = parse_number<int>(k, v);
            };
        };
        auto flag = [&t](const char* name, bool DistillConfig::*member) {
            t[name] = [member](DistillConfig& c, const std::string& k, const std::string& v) {
                c.*member = parse_bool(k, v);
            };
        };
        real("prune_alpha_threshold", &DistillConfig::prune_alpha_threshold);
        real("lambda_sigma", &DistillConfig::lambda_sigma);
        real("lambda_color", &DistillConfig::lambda_color);
        integer("supervised_iters", &DistillConfig::supervised_iters);
        integer("rgb_iters", &DistillConfig::rgb_iters);
        integer("batch_rays", &DistillConfig::batch_rays);
        real("step", &DistillConfig::step);
        real("learning_rate", &DistillConfig::learning_rate);
        real("rgb_learning_rate", &DistillConfig::rgb_learning_rate);
        real("beta1", &DistillConfig::beta1);
        real("beta2", &DistillConfig::beta2);
        real("epsilon", &DistillConfig::epsilon);
        real("supervised_epsilon", &DistillConfig::supervised_epsilon);
        flag("jitter", &DistillConfig::jitter);
        flag("early_termination", &DistillConfig::early_termination);
        integer("workers", &DistillConfig::workers);
        t["seed"] = [](DistillConfig& c, const std::string& k, const std::string& v) {
            c.seed = parse_number<std::uint64_t>(k, v);
        };
        t["background"] = [](DistillConfig& c, const std::string& k, const std::string& v) {
            std::istringstream in(v);
            std::string a, b, d, extra;
            if (!(in >> a >> b >> d) || (in >> extra)) {
                throw ConfigError(k, "expected three numbers");
            }
            c.background = Vec3(parse_number<double>(k, a), parse_number<double>(k, b), parse_number<double>(k, d));
        };
        return t;
    }();
    return table;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

template <typename Source>
ImageBuffer timed_render(const Source& source, const Camera& cam, const RenderConfig& cfg, double& ms) {
    const auto t0 = std::chrono::steady_clock::now();
    ImageBuffer img = render_image(source, cam, cfg);
    ms = elapsed_ms(t0);
    return img;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

std::string view_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "view_%03zu", i);
    return buf;
}

long peak_rss_kb() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) {
        return -1;
    }
    return usage.ru_maxrss;
}

}  // namespace

void apply_config(std::istream& in, DistillConfig& cfg, const std::string& source) {
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source, number, "expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ParseError(source, number, "unknown config key '" + key + "'");
        }
        try {
            it->second(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ParseError(source, number, e.what());
        }
    }
}

DistillConfig effective_config(const CommonOptions& options, const DistillConfig& base) {
    DistillConfig cfg = base;
    if (options.config_path) {
        std::ifstream in(*options.config_path);
        if (!in) {
            throw std::runtime_error("cannot open config '" + options.config_path->string() + "'");
        }
        apply_config(in, cfg, options.config_path->string());
    }
    if (options.seed) {
        cfg.seed = *options.seed;
    }
    if (options.workers) {
        cfg.workers = *options.workers;
    }
    if (options.no_jitter) {
        cfg.jitter = false;
    }
    if (options.oracle) {
        cfg.early_termination = false;
    }
    validate_distill_config(cfg);
    return cfg;
}

GenOutput cmd_gen(const std::string& spec, const fs::path& out_dir, std::uint64_t seed) {
    SceneSpec parsed;
    std::error_code ec;
    if (fs::is_regular_file(spec, ec)) {
        std::ifstream in(spec);
        if (!in) {
            throw std::runtime_error("cannot read spec '" + spec + "'");
        }
        parsed = parse_scene_spec(in, spec);
    } else {
        const auto names = desk_scene_names();
        if (std::find(names.begin(), names.end(), spec) == names.end()) {
            throw std::runtime_error("'" + spec + "' is neither a readable spec file nor a built-in scene");
        }
        std::istringstream in(builtin_scene_spec(spec));
        parsed = parse_scene_spec(in, spec);
    }
    const DeskScene desk = build_scene(parsed, seed);

    fs::create_directories(out_dir);
    GenOutput out;
    SceneFile scene_file;
    scene_file.background_index = desk.scene.background_index();
    std::vector<std::string> written;
    for (std::size_t i = 0; i < desk.scene.size(); ++i) {
        const std::string& name = desk.field_names[i];
        const fs::path file = name + ".frf";
        if (std::find(written.begin(), written.end(), name) == written.end()) {
            save_field(out_dir / file, desk.scene.entries()[i].field);
            out.field_files.push_back(out_dir / file);
            written.push_back(name);
        }
        scene_file.entries.push_back({file, desk.scene.entries()[i].placement});
    }
    out.scene_file = out_dir / "scene.txt";
    out.train_cameras = out_dir / "train_cameras.txt";
    out.heldout_cameras = out_dir / "heldout_cameras.txt";
    save_scene(out.scene_file, scene_file);
    save_cameras(out.train_cameras, desk.train);
    save_cameras(out.heldout_cameras, desk.heldout);
    return out;
}

RenderTiming cmd_render(const fs::path& scene_path, const fs::path& cameras_path,
                        const std::optional<fs::path>& fused_field, const fs::path& out_dir,
                        const RenderConfig& render) {
    validate_render_config(render);
    const std::vector<Camera> cameras = load_cameras(cameras_path);
    RenderTiming timing;
    std::vector<ImageBuffer> images;
    auto run = [&](const auto& source) {
        if (!cameras.empty()) {
            double ignored = 0.0;
            timed_render(source, cameras.front(), render, ignored);
        }
        for (const auto& cam : cameras) {
            double ms = 0.0;
            images.push_back(timed_render(source, cam, render, ms));
            timing.frame_ms.push_back(ms);
        }
    };
    if (fused_field) {
        const VoxelField field = load_field(*fused_field);
        timing.mode = "fused";
        timing.payload_bytes = footprint_bytes(field);
        run(field);
    } else {
        const ComposedScene scene = load_scene(scene_path);
        timing.mode = "composed";
        timing.payload_bytes = payload_bytes(scene);
        run(scene);
    }

    fs::create_directories(out_dir);
    std::ofstream log(out_dir / "render_log.txt", std::ios::app);
    if (!log) {
        throw std::runtime_error("cannot write " + (out_dir / "render_log.txt").string());
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        write_ppm(out_dir / (view_name(i) + ".ppm"), images[i]);
        write_f32(out_dir / (view_name(i) + ".f32"), images[i]);
        log << "render mode=" << timing.mode << " view=" << i << " ms=" << text::format_double(timing.frame_ms[i])
            << " payload_bytes=" << timing.payload_bytes << "\n";
    }
    return timing;
}

TrainingReport cmd_fuse(const fs::path& scene_path, const fs::path& out_field, const DistillConfig& cfg,
                        const std::optional<fs::path>& cameras_path, const std::optional<fs::path>& report_path) {
    validate_distill_config(cfg);
    const ComposedScene scene = load_scene(scene_path);
    std::vector<Camera> cameras;
    const bool trains = cfg.supervised_iters > 0 || cfg.rgb_iters > 0;
    const fs::path cam_file = cameras_path ? *cameras_path : scene_path.parent_path() / "train_cameras.txt";
    if (cameras_path || trains) {
        cameras = load_cameras(cam_file);
    }
    FuseResult result = fuse(scene, cameras, cfg);
    result.report.set("peak_rss_kb", std::to_string(peak_rss_kb()));
    save_field(out_field, result.student);
    const fs::path report_file = report_path ? *report_path : fs::path(out_field.string() + ".report.txt");
    std::ofstream out(report_file);
    if (!out) {
        throw std::runtime_error("cannot write " + report_file.string());
    }
    write_report(out, result.report);
    return result.report;
}

DistillConfig bench_default_config() {
    DistillConfig cfg;
    cfg.supervised_iters = 200;
    cfg.rgb_iters = 20;
    cfg.batch_rays = 2048;
    return cfg;
}

BenchReport cmd_bench(const std::string& family, const std::vector<int>& n_list, const BenchOptions& options) {
    if (n_list.empty()) {
        throw std::invalid_argument("bench: N list is empty");
    }
    if (options.frames < 1 || options.repeats < 1 || options.warmup < 0) {
        throw std::invalid_argument("bench: frames and repeats must be >= 1 and warmup >= 0");
    }
    validate_distill_config(options.fuse);
    const RenderConfig render = render_config_for(options.fuse);

    BenchReport report;
    report.family = family;
    report.n_list = n_list;

    struct Case {
        int n;
        DeskScene desk;
        VoxelField fused;
        std::vector<ImageBuffer> reference;
        std::vector<double> composed_ms;
        std::vector<double> fused_ms;
        double psnr_sum = 0.0;
    };
    std::vector<Case> cases;
    for (const int n : n_list) {
        DeskScene desk = make_bench_scene(family, n, options.fuse.seed);
        VoxelField fused = fuse(desk.scene, desk.train, options.fuse).student;
        cases.push_back({n, std::move(desk), std::move(fused), {}, {}, {}, 0.0});
    }
    // The background field alone: what a single-field renderer costs on the same frames.
    const VoxelField& single = cases.front().desk.scene.background().field;
    std::vector<double> single_ms;
    double single_psnr_sum = 0.0;

    auto frame_cam = [](const Case& c, int f) -> const Camera& {
        return c.desk.train[static_cast<std::size_t>(f) % c.desk.train.size()];
    };
    double ms = 0.0;
    for (int f = 0; f < options.warmup; ++f) {
        for (const Case& c : cases) {
            timed_render(c.desk.scene, frame_cam(c, f), render, ms);
            timed_render(c.fused, frame_cam(c, f), render, ms);
        }
        timed_render(single, frame_cam(cases.front(), f), render, ms);
    }
    // Every frame is rendered `repeats` times, round-robin over all cases, so interference
    // from other processes hits every case alike; each frame keeps its fastest repeat.
    const auto frames = static_cast<std::size_t>(options.frames);
    for (Case& c : cases) {
        c.composed_ms.assign(frames, kInfinity);
        c.fused_ms.assign(frames, kInfinity);
    }
    single_ms.assign(frames, kInfinity);
    for (int rep = 0; rep < options.repeats; ++rep) {
        for (std::size_t f = 0; f < frames; ++f) {
            const int fi = static_cast<int>(f);
            for (Case& c : cases) {
                ImageBuffer reference = timed_render(c.desk.scene, frame_cam(c, fi), render, ms);
                c.composed_ms[f] = std::min(c.composed_ms[f], ms);
                const ImageBuffer img = timed_render(c.fused, frame_cam(c, fi), render, ms);
                c.fused_ms[f] = std::min(c.fused_ms[f], ms);
                if (rep == 0) {
                    c.psnr_sum += psnr(img, reference);
                    c.reference.push_back(std::move(reference));
                }
            }
            const ImageBuffer img = timed_render(single, frame_cam(cases.front(), fi), render, ms);
            single_ms[f] = std::min(single_ms[f], ms);
            if (rep == 0) {
                single_psnr_sum += psnr(img, cases.front().reference[f]);
            }
        }
    }
    for (const Case& c : cases) {
        report.rows.push_back({c.n, "composed", mean(c.composed_ms), payload_bytes(c.desk.scene), kPsnrCap});
        report.rows.push_back(
            {c.n, "fused", mean(c.fused_ms), footprint_bytes(c.fused), c.psnr_sum / options.frames});
    }
    report.rows.push_back({1, "single", mean(single_ms), footprint_bytes(single), single_psnr_sum / options.frames});
    const Resolution student_res = cases.front().fused.resolution();
    const int width = cases.front().desk.train.front().width;
    const int height = cases.front().desk.train.front().height;

    auto& c = report.config;
    std::string ns;
    for (const int n : n_list) {
        ns += (ns.empty() ? "" : ",") + std::to_string(n);
    }
    c.emplace_back("family", family);
    c.emplace_back("n_list", ns);
    c.emplace_back("frames", std::to_string(options.frames));
    c.emplace_back("repeats", std::to_string(options.repeats));
    c.emplace_back("frame_statistic", "mean over frames of the fastest repeat");
    c.emplace_back("warmup", std::to_string(options.warmup));
    c.emplace_back("image", std::to_string(width) + "x" + std::to_string(height));
    c.emplace_back("student_resolution", std::to_string(student_res[0]) + "x" + std::to_string(student_res[1]) +
                                             "x" + std::to_string(student_res[2]));
    c.emplace_back("peak_rss_kb", std::to_string(peak_rss_kb()));
    TrainingReport echo;
    echo_config(echo, options.fuse);
    for (const auto& kv : echo.summary) {
        c.push_back(kv);
    }
    return report;
}

void write_bench_report(std::ostream& out, const BenchReport& report) {
    out << "# fusedrf bench report\n";
    for (const auto& [k, v] : report.config) {
        out << "config " << k << "=" << v << "\n";
    }
    for (const auto& r : report.rows) {
        out << "row num_fields=" << r.num_fields << " mode=" << r.mode
            << " render_ms_per_frame=" << text::format_double(r.render_ms_per_frame)
            << " field_payload_bytes=" << r.field_payload_bytes
            << " psnr_vs_composed=" << text::format_double(r.psnr_vs_composed) << "\n";
    }
}

void save_bench_report(const fs::path& path, const BenchReport& report) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_bench_report(out, report);
}

std::string cmd_psnr(const fs::path& a, const fs::path& b) {
    const double value = psnr(read_f32(a), read_f32(b));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        int n = 0;
        const char* end = item.data() + item.size();
        const auto [ptr, ec] = std::from_chars(item.data(), end, n);
        if (item.empty() || ec != std::errc{} || ptr != end || n < 1) {
            throw std::invalid_argument("invalid N list entry '" + item + "'");
        }
        out.push_back(n);
    }
    if (out.empty()) {
        throw std::invalid_argument("N list is empty");
    }
    return out;
}

}  // namespace fusedrf::cli
