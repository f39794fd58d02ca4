#pragma once

#include "fusedrf/math.hpp"

#include <filesystem>
#include <vector>

namespace fusedrf {

/// Row-major RGB image with f32 channels in [0,1].
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, const Vec3& fill = Vec3::Zero());

    [[nodiscard]] Vec3 at(int x, int y) const {
        const float* p = &pixels[3 * (static_cast<std::size_t>(y) * width + x)];
        return {p[0], p[1], p[2]};
    }
    /// Stores the color clamped to [0,1].
    void set(int x, int y, const Vec3& color);

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

inline constexpr double kPsnrCap = 99.0;

/// Mean squared error over all channels. Throws std::invalid_argument on size mismatch.
double mse(const ImageBuffer& a, const ImageBuffer& b);

/// -10 log10(MSE) with unit peak; kPsnrCap when the images are identical.
double psnr(const ImageBuffer& a, const ImageBuffer& b);
double psnr_from_mse(double mse);

/// Binary P6, maxval 255, channel = round(clamped * 255).
void write_ppm(const std::filesystem::path& path, const ImageBuffer& image);

// Raw dump: u32 width, u32 height (little-endian), then width*height*3 f32 RGB.
void write_f32(const std::filesystem::path& path, const ImageBuffer& image);
ImageBuffer read_f32(const std::filesystem::path& path);

}  // namespace fusedrf
