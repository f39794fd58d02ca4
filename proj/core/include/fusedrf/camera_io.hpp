#pragma once

#include "fusedrf/sampling.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fusedrf {

// Camera file grammar, one record per camera:
//
//   camera
//   fx <f>
//   fy <f>
//   cx <f>
//   cy <f>
//   width <int>
//   height <int>
//   rotation <r00 r01 r02 r10 r11 r12 r20 r21 r22>   # row-major, camera -> world
//   translation <x y z>                             # camera center in world
//   end
//
// All eight fields are required once per record; '#' comments and blank lines are ignored.

std::vector<Camera> read_cameras(std::istream& in, const std::string& source = "<cameras>");
void write_cameras(std::ostream& out, const std::vector<Camera>& cameras);

std::vector<Camera> load_cameras(const std::filesystem::path& path);
void save_cameras(const std::filesystem::path& path, const std::vector<Camera>& cameras);

}  // namespace fusedrf
