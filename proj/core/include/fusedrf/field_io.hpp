#pragma once

#include "fusedrf/field.hpp"

#include <filesystem>
#include <iosfwd>

namespace fusedrf {

// FRF1 layout, all little-endian:
//   "FRF1" | u32 nx, ny, nz | f32 min.xyz, max.xyz |
//   f32 density[nx*ny*nz] | f32 rgb[3*nx*ny*nz]
// Both grids run x-fastest. Values are narrowed to f32 on write.

void write_field(std::ostream& out, const VoxelField& field);
VoxelField read_field(std::istream& in);

void save_field(const std::filesystem::path& path, const VoxelField& field);
VoxelField load_field(const std::filesystem::path& path);

/// Rounds every parameter and the bounds to f32 precision, i.e. what a save/load cycle yields.
VoxelField quantize_to_stored(const VoxelField& field);

}  // namespace fusedrf
