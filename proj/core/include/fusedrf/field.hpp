#pragma once

#include "fusedrf/math.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fusedrf {

/// Activated radiance at a point: density per unit length and RGB in [0,1]^3.
struct FieldSample {
    double sigma = 0.0;
    Vec3 color = Vec3::Zero();
};

using Resolution = std::array<int, 3>;

/**
 * Dense vertex-centered voxel lattice of raw (pre-activation) density and color.
 *
 * Vertex (0,0,0) sits at bounds.min and vertex (N-1, N-1, N-1) at bounds.max, so a
 * resolution of N per axis spans N-1 cells. Parameters are stored interleaved per
 * vertex as [density, red, green, blue]; vertex indices run x-fastest. The flat
 * parameter index of channel c at vertex v is `v * kChannels + c`, which is the
 * index space gradients and the optimizer work in.
 */
class VoxelField {
public:
    static constexpr int kChannels = 4;

    VoxelField(const Aabb& bounds, const Resolution& resolution, double raw_density = 0.0,
               const Vec3& raw_color = Vec3::Zero());

    [[nodiscard]] const Aabb& bounds() const { return bounds_; }
    [[nodiscard]] const Resolution& resolution() const { return resolution_; }
    [[nodiscard]] std::size_t vertex_count() const {
        return static_cast<std::size_t>(resolution_[0]) * resolution_[1] * resolution_[2];
    }
    [[nodiscard]] std::size_t parameter_count() const { return params_.size(); }

    [[nodiscard]] std::span<double> parameters() { return params_; }
    [[nodiscard]] std::span<const double> parameters() const { return params_; }

    [[nodiscard]] std::size_t vertex_index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(resolution_[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(resolution_[1]) * z);
    }
    [[nodiscard]] Vec3 vertex_position(int x, int y, int z) const;
    /// Edge length of one cell along each axis.
    [[nodiscard]] Vec3 cell_size() const { return cell_size_; }

    [[nodiscard]] double raw_density(std::size_t vertex) const { return params_[vertex * kChannels]; }
    void set_raw_density(std::size_t vertex, double value) { params_[vertex * kChannels] = value; }
    [[nodiscard]] Vec3 raw_color(std::size_t vertex) const {
        const double* c = &params_[vertex * kChannels + 1];
        return {c[0], c[1], c[2]};
    }
    void set_raw_color(std::size_t vertex, const Vec3& value) {
        double* c = &params_[vertex * kChannels + 1];
        c[0] = value.x();
        c[1] = value.y();
        c[2] = value.z();
    }

    /// Same as query_point(*this, p); lets a field act as a render source directly.
    [[nodiscard]] FieldSample query(const Vec3& p) const;

    friend bool operator==(const VoxelField& a, const VoxelField& b) {
        return a.bounds_ == b.bounds_ && a.resolution_ == b.resolution_ && a.params_ == b.params_;
    }

private:
    Aabb bounds_;
    Resolution resolution_;
    Vec3 cell_size_;
    std::vector<double> params_;
};

/// Raw interpolated channels [density, r, g, b] before activation.
using RawSample = std::array<double, VoxelField::kChannels>;

/// Trilinear cell lookup for a point inside the lattice.
struct LatticeCell {
    std::array<std::size_t, 8> vertices{};
    std::array<double, 8> weights{};
};

/// Raw density used to mark a vertex as empty (softplus(-20) < 1e-8).
inline constexpr double kEmptyRawDensity = -20.0;

/// Locates the 8-vertex cell around p. Returns false when p lies outside the bounds.
/// Corner order is x-fastest: bit 0 = +x, bit 1 = +y, bit 2 = +z.
bool locate_cell(const VoxelField& field, const Vec3& p, LatticeCell& cell);

/// Trilinear interpolation of raw parameters; false outside the bounds.
bool interpolate_raw(const VoxelField& field, const Vec3& p, RawSample& out);

/// Activated (sigma, color) at p. Zero density and black outside the bounds.
FieldSample query_point(const VoxelField& field, const Vec3& p);

/// Per-sample opacity for a step of length delta: 1 - exp(-sigma * delta).
double alpha_from_density(double sigma, double delta);

/**
 * Sparse derivative of query_point with respect to the raw parameters of the 8
 * vertices surrounding p. Color channel k only depends on raw color channel k, so
 * d_color stores the diagonal.
 */
struct ParamGradient {
    FieldSample value;
    std::array<std::size_t, 8> vertices{};
    std::array<double, 8> d_sigma{};
    std::array<Vec3, 8> d_color{};
};

/// Throws std::out_of_range when p is outside the field bounds.
ParamGradient query_param_gradient(const VoxelField& field, const Vec3& p);

/// Copy with every vertex outside sub_bounds emptied (raw density kEmptyRawDensity).
/// Throws std::invalid_argument when sub_bounds contains no lattice vertex.
VoxelField crop_field(const VoxelField& field, const Aabb& sub_bounds);

/// Header of the FRF1 file: magic, 3 x u32 resolution, 6 x f32 bounds.
inline constexpr std::size_t kFieldHeaderBytes = 4 + 3 * 4 + 6 * 4;
inline constexpr std::size_t kStoredScalarBytes = 4;

/// Serialized size of the field: header plus 4 f32 channels per vertex.
std::size_t footprint_bytes(const VoxelField& field);

}  // namespace fusedrf
