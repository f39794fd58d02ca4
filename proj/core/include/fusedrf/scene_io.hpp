#pragma once

#include "fusedrf/composer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fusedrf {

// Scene file grammar:
//
//   background <index>                 # required once; 0-based entry index
//   entry <field-path>                 # starts an entry; path relative to the scene file
//   rotation <r00 ... r22>             # optional, row-major, local -> world
//   quaternion <w x y z>               # optional alternative to rotation (normalized on read)
//   translation <x y z>                # optional, default 0
//   scale <s>                          # optional, default 1, must be > 0
//
// rotation/quaternion/translation/scale apply to the most recent entry and may appear at
// most once per entry.

struct SceneFileEntry {
    std::filesystem::path field_path;
    Placement placement;
};

struct SceneFile {
    std::vector<SceneFileEntry> entries;
    std::size_t background_index = 0;
};

SceneFile parse_scene(std::istream& in, const std::string& source = "<scene>");
void write_scene(std::ostream& out, const SceneFile& scene);

/// Parses the scene file and loads every referenced field (relative to the file's directory).
ComposedScene load_scene(const std::filesystem::path& path);
void save_scene(const std::filesystem::path& path, const SceneFile& scene);

}  // namespace fusedrf
