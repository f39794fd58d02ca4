#pragma once

#include <fusedrf/distiller.hpp>
#include <fusedrf/render.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fusedrf::cli {

namespace fs = std::filesystem;

/// Flags shared by every verb. Unset values leave the config file / defaults alone.
struct CommonOptions {
    std::optional<fs::path> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool no_jitter = false;
    bool oracle = false;
};

/**
 * Config files hold one `key = value` per line ('#' comments). Keys are DistillConfig field
 * names; `background` takes three numbers. Unknown keys and malformed values raise ParseError
 * with the line; out-of-range values raise ConfigError naming the field.
 */
void apply_config(std::istream& in, DistillConfig& cfg, const std::string& source = "<config>");
/// Defaults, then `base` overrides, then the config file, then flags; validated.
DistillConfig effective_config(const CommonOptions& options, const DistillConfig& base = {});

struct GenOutput {
    std::vector<fs::path> field_files;
    fs::path scene_file;
    fs::path train_cameras;
    fs::path heldout_cameras;
};

/**
 * Writes <field>.frf for every field of the scene spec, scene.txt, train_cameras.txt and
 * heldout_cameras.txt into out_dir. `spec` is a path to a scene spec file or a built-in
 * scene name.
 */
GenOutput cmd_gen(const std::string& spec, const fs::path& out_dir, std::uint64_t seed);

struct RenderTiming {
    std::string mode;
    std::vector<double> frame_ms;
    std::size_t payload_bytes = 0;
};

/**
 * Renders every camera either from the composed scene or, when fused_field is set, from that
 * single field. Writes view_NNN.ppm and view_NNN.f32 and appends one timing row per view to
 * out_dir/render_log.txt. The first view is rendered once untimed as warm-up; timings exclude
 * file I/O.
 */
RenderTiming cmd_render(const fs::path& scene_path, const fs::path& cameras_path,
                        const std::optional<fs::path>& fused_field, const fs::path& out_dir,
                        const RenderConfig& render);

/// Runs fuse() and writes the field plus its training report (report_path defaults to
/// out_field with ".report.txt" appended). Cameras default to train_cameras.txt beside the scene.
TrainingReport cmd_fuse(const fs::path& scene_path, const fs::path& out_field, const DistillConfig& cfg,
                        const std::optional<fs::path>& cameras_path = std::nullopt,
                        const std::optional<fs::path>& report_path = std::nullopt);

struct BenchRow {
    int num_fields = 0;
    std::string mode;  // "composed", "fused" or "single"
    double render_ms_per_frame = 0.0;
    std::size_t field_payload_bytes = 0;
    double psnr_vs_composed = 0.0;
};

struct BenchOptions {
    int frames = 5;
    /// Each frame is timed this many times and its fastest time kept.
    int repeats = 3;
    int warmup = 1;
    /// Fuse settings; iteration budgets here are what the report echoes.
    DistillConfig fuse;
};

/// Bench runs use a reduced fuse budget unless overridden.
DistillConfig bench_default_config();

struct BenchReport {
    std::string family;
    std::vector<int> n_list;
    std::vector<BenchRow> rows;
    std::vector<std::pair<std::string, std::string>> config;
};

/**
 * For each N: builds the N-entry bench scene and fuses it. Then times composed and fused
 * rendering for every N, plus the lone background field ("single" row), frame by frame in
 * round-robin order. Records payload bytes and PSNR against the composed render. Frames cycle
 * over the scene's training cameras; `warmup` untimed rounds come first. Render time per frame
 * is the mean over frames of each frame's fastest repeat.
 */
BenchReport cmd_bench(const std::string& family, const std::vector<int>& n_list, const BenchOptions& options);

void write_bench_report(std::ostream& out, const BenchReport& report);
void save_bench_report(const fs::path& path, const BenchReport& report);

/// PSNR between two f32 dumps, formatted with two decimals.
std::string cmd_psnr(const fs::path& a, const fs::path& b);

/// Parses "1,2,4,8".
std::vector<int> parse_n_list(const std::string& text);

}  // namespace fusedrf::cli
