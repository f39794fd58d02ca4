#pragma once

// Shared helpers for the unit tests: random fields/points and tolerance checks.

#include <fusedrf/field.hpp>
#include <fusedrf/math.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace fusedrf::test {

inline double rel_err(double a, double b, double floor = 1e-8) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline Vec3 random_point(const Aabb& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return box.min + box.extent().cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
}

inline VoxelField random_field(const Aabb& box, const Resolution& res, std::uint64_t seed, double lo = -3.0,
                               double hi = 3.0) {
    VoxelField field(box, res);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    for (double& v : field.parameters()) {
        v = u(rng);
    }
    return field;
}

/// Trilinear interpolation written as successive lerps along x, then y, then z.
inline double lerp_oracle(const VoxelField& f, const Vec3& p, int channel) {
    const auto& res = f.resolution();
    int idx[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
        const double u = (p[a] - f.bounds().min[a]) / f.bounds().extent()[a] * (res[a] - 1);
        idx[a] = std::clamp(static_cast<int>(std::floor(u)), 0, res[a] - 2);
        frac[a] = u - idx[a];
    }
    auto at = [&](int dx, int dy, int dz) {
        return f.parameters()[f.vertex_index(idx[0] + dx, idx[1] + dy, idx[2] + dz) * VoxelField::kChannels +
                              channel];
    };
    auto lerp = [](double a, double b, double t) { return a + t * (b - a); };
    const double c00 = lerp(at(0, 0, 0), at(1, 0, 0), frac[0]);
    const double c10 = lerp(at(0, 1, 0), at(1, 1, 0), frac[0]);
    const double c01 = lerp(at(0, 0, 1), at(1, 0, 1), frac[0]);
    const double c11 = lerp(at(0, 1, 1), at(1, 1, 1), frac[0]);
    return lerp(lerp(c00, c10, frac[1]), lerp(c01, c11, frac[1]), frac[2]);
}

}  // namespace fusedrf::test
