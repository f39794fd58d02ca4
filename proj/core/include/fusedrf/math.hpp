#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>

namespace fusedrf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Axis-aligned box in world units.
struct Aabb {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Ones();

    [[nodiscard]] bool valid() const { return (min.array() < max.array()).all(); }
    [[nodiscard]] Vec3 extent() const { return max - min; }
    [[nodiscard]] Vec3 center() const { return 0.5 * (min + max); }

    [[nodiscard]] bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }

    [[nodiscard]] Aabb merged(const Aabb& other) const {
        return {min.cwiseMin(other.min), max.cwiseMax(other.max)};
    }

    friend bool operator==(const Aabb& a, const Aabb& b) { return a.min == b.min && a.max == b.max; }
};

// Activations. Raw parameters are unconstrained; density goes through softplus,
// color through the logistic sigmoid.
double softplus(double x);
double sigmoid(double x);
/// Inverse of softplus for y > 0; returns -inf at y == 0.
double softplus_inverse(double y);
/// Inverse of sigmoid for y in (0, 1); returns +-inf at the endpoints.
double logit(double y);

/// SplitMix64 finalizer, used to derive independent per-ray / per-iteration seeds.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace fusedrf
