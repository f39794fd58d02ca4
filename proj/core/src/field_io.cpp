#include "fusedrf/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace fusedrf {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'R', 'F', '1'};


template <typename T>
void put(std::vector<char>& buf, T value) {
    static_assert(sizeof(T) == 4);
    auto bits = std::bit_cast<std::uint32_t>(value);
    for (int i = 0; i < 4; ++i) {
        buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
    }
}

template <typename T>
T get(const char* p) {
    static_assert(sizeof(T) == 4);
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    }
    return std::bit_cast<T>(bits);
}

void read_exact(std::istream& in, char* dst, std::size_t n) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw std::runtime_error("read_field: truncated FRF1 stream");
    }
}

}  // namespace

void write_field(std::ostream& out, const VoxelField& field) {
    const std::size_t n = field.vertex_count();
    std::vector<char> buf;
    buf.reserve(footprint_bytes(field));
    buf.insert(buf.end(), kMagic.begin(), kMagic.end());
    for (int r : field.resolution()) {
        put(buf, static_cast<std::uint32_t>(r));
    }
    for (int a = 0; a < 3; ++a) {
        put(buf, static_cast<float>(field.bounds().min[a]));
    }
    for (int a = 0; a < 3; ++a) {
        put(buf, static_cast<float>(field.bounds().max[a]));
    }
    const auto params = field.parameters();
    for (std::size_t v = 0; v < n; ++v) {
        put(buf, static_cast<float>(params[v * VoxelField::kChannels]));
    }
    for (std::size_t v = 0; v < n; ++v) {
        for (int k = 1; k < VoxelField::kChannels; ++k) {
            put(buf, static_cast<float>(params[v * VoxelField::kChannels + k]));
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw std::runtime_error("write_field: stream write failed");
    }
}

VoxelField read_field(std::istream& in) {
    std::array<char, kFieldHeaderBytes> header{};
    read_exact(in, header.data(), header.size());
    if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
        throw std::runtime_error("read_field: bad magic, expected FRF1");
    }
    Resolution res{};
    for (int a = 0; a < 3; ++a) {
        const auto r = get<std::uint32_t>(header.data() + 4 + 4 * a);
        if (r < 2 || r > 4096) {
            throw std::runtime_error("read_field: resolution out of range");
        }
        res[a] = static_cast<int>(r);
    }
    Aabb box;
    for (int a = 0; a < 3; ++a) {
        box.min[a] = get<float>(header.data() + 16 + 4 * a);
        box.max[a] = get<float>(header.data() + 28 + 4 * a);
    }
    VoxelField field(box, res);
    const std::size_t n = field.vertex_count();
    std::vector<char> payload(n * VoxelField::kChannels * kStoredScalarBytes);
    read_exact(in, payload.data(), payload.size());

    auto params = field.parameters();
    const char* p = payload.data();
    for (std::size_t v = 0; v < n; ++v, p += 4) {
        params[v * VoxelField::kChannels] = get<float>(p);
    }
    for (std::size_t v = 0; v < n; ++v) {
        for (int k = 1; k < VoxelField::kChannels; ++k, p += 4) {
            params[v * VoxelField::kChannels + k] = get<float>(p);
        }
    }
    return field;
}

void save_field(const std::filesystem::path& path, const VoxelField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_field(out, field);
}

VoxelField load_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open field file " + path.string());
    }
    return read_field(in);
}

VoxelField quantize_to_stored(const VoxelField& field) {
    Aabb box;
    for (int a = 0; a < 3; ++a) {
        box.min[a] = static_cast<float>(field.bounds().min[a]);
        box.max[a] = static_cast<float>(field.bounds().max[a]);
    }
    VoxelField out(box, field.resolution());
    auto dst = out.parameters();
    const auto src = field.parameters();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<float>(src[i]);
    }
    return out;
}

}  // namespace fusedrf
