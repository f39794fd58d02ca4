#include "fusedrf/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fusedrf {

namespace {

// Points this close outside the box (relative to its extent) still count as inside;
// ray samples computed as origin + t * direction land on the faces with rounding error.
constexpr double kBoundsSlack = 1e-9;

}  // namespace

VoxelField::VoxelField(const Aabb& bounds, const Resolution& resolution, double raw_density,
                       const Vec3& raw_color)
    : bounds_(bounds), resolution_(resolution) {
    if (!bounds.valid()) {
        throw std::invalid_argument("VoxelField: bounds min must be < max on every axis");
    }
    for (int r : resolution) {
        if (r < 2) {
            throw std::invalid_argument("VoxelField: resolution must be >= 2 per axis, got " +
                                        std::to_string(r));
        }
    }
    for (int a = 0; a < 3; ++a) {
        cell_size_[a] = bounds_.extent()[a] / (resolution_[a] - 1);
    }
    params_.resize(vertex_count() * kChannels);
    for (std::size_t v = 0; v < vertex_count(); ++v) {
        double* p = &params_[v * kChannels];
        p[0] = raw_density;
        p[1] = raw_color.x();
        p[2] = raw_color.y();
        p[3] = raw_color.z();
    }
}

Vec3 VoxelField::vertex_position(int x, int y, int z) const {
    // Interpolating from both ends keeps the last vertex exactly on bounds.max.
    const std::array<int, 3> idx{x, y, z};
    Vec3 p;
    for (int a = 0; a < 3; ++a) {
        const double f = static_cast<double>(idx[a]) / (resolution_[a] - 1);
        p[a] = idx[a] == resolution_[a] - 1 ? bounds_.max[a]
                                            : bounds_.min[a] + f * bounds_.extent()[a];
    }
    return p;
}

FieldSample VoxelField::query(const Vec3& p) const { return query_point(*this, p); }

bool locate_cell(const VoxelField& field, const Vec3& p, LatticeCell& cell) {
    const Aabb& box = field.bounds();
    const Resolution& res = field.resolution();
    const Vec3 extent = box.extent();

    std::array<int, 3> base{};
    std::array<double, 3> frac{};
    for (int a = 0; a < 3; ++a) {
        const double slack = kBoundsSlack * extent[a];
        if (!(p[a] >= box.min[a] - slack && p[a] <= box.max[a] + slack)) {
            return false;  // also rejects NaN
        }
        const double cells = res[a] - 1;
        const double u = std::clamp((p[a] - box.min[a]) / extent[a] * cells, 0.0, cells);
        const int i = std::min(static_cast<int>(u), res[a] - 2);
        base[a] = i;
        frac[a] = u - i;
    }

    const std::size_t v0 = field.vertex_index(base[0], base[1], base[2]);
    const std::size_t sy = static_cast<std::size_t>(res[0]);
    const std::size_t sz = sy * static_cast<std::size_t>(res[1]);
    const double fx = frac[0];
    const double fy = frac[1];
    const double fz = frac[2];
    for (int corner = 0; corner < 8; ++corner) {
        const int dx = corner & 1;
        const int dy = (corner >> 1) & 1;
        const int dz = (corner >> 2) & 1;
        cell.vertices[corner] = v0 + dx + dy * sy + dz * sz;
        cell.weights[corner] = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
    }
    return true;
}

bool interpolate_raw(const VoxelField& field, const Vec3& p, RawSample& out) {
    LatticeCell cell;
    if (!locate_cell(field, p, cell)) {
        return false;
    }
    const auto params = field.parameters();
    out = {0.0, 0.0, 0.0, 0.0};
    for (int corner = 0; corner < 8; ++corner) {
        const double w = cell.weights[corner];
        const double* v = &params[cell.vertices[corner] * VoxelField::kChannels];
        out[0] += w * v[0];
        out[1] += w * v[1];
        out[2] += w * v[2];
        out[3] += w * v[3];
    }
    return true;
}

FieldSample query_point(const VoxelField& field, const Vec3& p) {
    RawSample raw;
    if (!interpolate_raw(field, p, raw)) {
        return {};
    }
    return {softplus(raw[0]), Vec3(sigmoid(raw[1]), sigmoid(raw[2]), sigmoid(raw[3]))};
}

double alpha_from_density(double sigma, double delta) { return -std::expm1(-sigma * delta); }

ParamGradient query_param_gradient(const VoxelField& field, const Vec3& p) {
    LatticeCell cell;
    if (!locate_cell(field, p, cell)) {
        throw std::out_of_range("query_param_gradient: point outside field bounds");
    }
    const auto params = field.parameters();
    RawSample raw{0.0, 0.0, 0.0, 0.0};
    for (int corner = 0; corner < 8; ++corner) {
        const double w = cell.weights[corner];
        const double* v = &params[cell.vertices[corner] * VoxelField::kChannels];
        for (int c = 0; c < VoxelField::kChannels; ++c) {
            raw[c] += w * v[c];
        }
    }

    ParamGradient g;
    g.value.sigma = softplus(raw[0]);
    const double dsoftplus = sigmoid(raw[0]);
    Vec3 dsig;
    for (int k = 0; k < 3; ++k) {
        const double s = sigmoid(raw[k + 1]);
        g.value.color[k] = s;
        dsig[k] = s * (1.0 - s);
    }
    g.vertices = cell.vertices;
    for (int corner = 0; corner < 8; ++corner) {
        g.d_sigma[corner] = cell.weights[corner] * dsoftplus;
        g.d_color[corner] = cell.weights[corner] * dsig;
    }
    return g;
}

VoxelField crop_field(const VoxelField& field, const Aabb& sub_bounds) {
    VoxelField out = field;
    const Resolution& res = field.resolution();
    std::size_t kept = 0;
    for (int z = 0; z < res[2]; ++z) {
        for (int y = 0; y < res[1]; ++y) {
            for (int x = 0; x < res[0]; ++x) {
                const std::size_t v = field.vertex_index(x, y, z);
                if (sub_bounds.contains(field.vertex_position(x, y, z))) {
                    ++kept;
                } else {
                    out.set_raw_density(v, kEmptyRawDensity);
                }
            }
        }
    }
    if (kept == 0) {
        throw std::invalid_argument("crop_field: crop box contains no lattice vertex");
    }
    return out;
}

std::size_t footprint_bytes(const VoxelField& field) {
    return kFieldHeaderBytes + field.vertex_count() * VoxelField::kChannels * kStoredScalarBytes;
}

}  // namespace fusedrf
