#include "fusedrf/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fusedrf {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& source) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
        throw std::runtime_error(source + ": truncated image dump");
    }
    return bytes[0] | (bytes[1] << 8) | (bytes[2] << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

ImageBuffer::ImageBuffer(int w, int h, const Vec3& fill) : width(w), height(h) {
    if (w < 0 || h < 0) {
        throw std::invalid_argument("ImageBuffer: negative size");
    }
    pixels.resize(3 * static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = static_cast<float>(std::clamp(fill.x(), 0.0, 1.0));
        pixels[i + 1] = static_cast<float>(std::clamp(fill.y(), 0.0, 1.0));
        pixels[i + 2] = static_cast<float>(std::clamp(fill.z(), 0.0, 1.0));
    }
}

void ImageBuffer::set(int x, int y, const Vec3& color) {
    float* p = &pixels[3 * (static_cast<std::size_t>(y) * width + x)];
    for (int k = 0; k < 3; ++k) {
        p[k] = static_cast<float>(std::clamp(color[k], 0.0, 1.0));
    }
}

double mse(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("psnr: image sizes differ (" + std::to_string(a.width) + "x" +
                                    std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                                    std::to_string(b.height) + ")");
    }
    if (a.pixels.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(a.pixels.size());
}

double psnr_from_mse(double value) {
    if (value <= 0.0) {
        return kPsnrCap;
    }
    return std::min(kPsnrCap, -10.0 * std::log10(value));
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) { return psnr_from_mse(mse(a, b)); }

void write_ppm(const std::filesystem::path& path, const ImageBuffer& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    std::string bytes(image.pixels.size(), '\0');
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        const double v = std::clamp(static_cast<double>(image.pixels[i]), 0.0, 1.0);
        bytes[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_f32(const std::filesystem::path& path, const ImageBuffer& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    put_u32(out, static_cast<std::uint32_t>(image.width));
    put_u32(out, static_cast<std::uint32_t>(image.height));
    for (float v : image.pixels) {
        put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
}

ImageBuffer read_f32(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open image dump " + path.string());
    }
    const std::string source = path.string();
    const auto w = get_u32(in, source);
    const auto h = get_u32(in, source);
    if (w > (1u << 16) || h > (1u << 16)) {
        throw std::runtime_error(source + ": implausible image size");
    }
    ImageBuffer image(static_cast<int>(w), static_cast<int>(h));
    for (float& v : image.pixels) {
        v = std::bit_cast<float>(get_u32(in, source));
    }
    return image;
}

}  // namespace fusedrf
