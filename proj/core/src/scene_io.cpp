#include "fusedrf/scene_io.hpp"

#include "fusedrf/field_io.hpp"
#include "fusedrf/text_format.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace fusedrf {

SceneFile parse_scene(std::istream& in, const std::string& source) {
    SceneFile scene;
    bool have_background = false;
    std::size_t background_line = 0;
    std::set<std::string> seen;  // per-entry keys

    for (const auto& line : text::tokenize(in)) {
        const std::string& key = line.tokens.front();
        if (key == "background") {
            text::expect_count(source, line, 2);
            if (have_background) {
                throw ParseError(source, line.number, "duplicate 'background'");
            }
            const auto idx = text::to_int(source, line, 1);
            if (idx < 0) {
                throw ParseError(source, line.number, "background index must be >= 0");
            }
            scene.background_index = static_cast<std::size_t>(idx);
            have_background = true;
            background_line = line.number;
            continue;
        }
        if (key == "entry") {
            text::expect_count(source, line, 2);
            scene.entries.push_back({line.tokens[1], Placement{}});
            seen.clear();
            continue;
        }
        if (scene.entries.empty()) {
            throw ParseError(source, line.number, "'" + key + "' before any 'entry'");
        }
        Placement& pl = scene.entries.back().placement;
        const bool is_rotation = key == "rotation" || key == "quaternion";
        const std::string slot = is_rotation ? "rotation" : key;
        if (seen.count(slot)) {
            throw ParseError(source, line.number, "duplicate " + slot + " for this entry");
        }
        if (key == "rotation") {
            text::expect_count(source, line, 10);
            for (int i = 0; i < 9; ++i) {
                pl.rotation(i / 3, i % 3) = text::to_double(source, line, 1 + i);
            }
        } else if (key == "quaternion") {
            text::expect_count(source, line, 5);
            Eigen::Quaterniond q(text::to_double(source, line, 1), text::to_double(source, line, 2),
                                 text::to_double(source, line, 3), text::to_double(source, line, 4));
            if (q.norm() == 0.0) {
                throw ParseError(source, line.number, "zero quaternion");
            }
            pl.rotation = q.normalized().toRotationMatrix();
        } else if (key == "translation") {
            text::expect_count(source, line, 4);
            pl.translation = text::to_vec3(source, line, 1);
        } else if (key == "scale") {
            text::expect_count(source, line, 2);
            pl.scale = text::to_double(source, line, 1);
        } else {
            throw ParseError(source, line.number, "unknown scene keyword '" + key + "'");
        }
        try {
            validate_placement(pl);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, line.number, e.what());
        }
        seen.insert(slot);
    }
    if (scene.entries.empty()) {
        throw ParseError(source, 1, "scene has no entries");
    }
    if (!have_background) {
        throw ParseError(source, 1, "missing 'background'");
    }
    if (scene.background_index >= scene.entries.size()) {
        throw ParseError(source, background_line, "background index out of range");
    }
    return scene;
}

void write_scene(std::ostream& out, const SceneFile& scene) {
    using text::format_double;
    out << "# fusedrf scene\n";
    out << "background " << scene.background_index << "\n";
    for (const auto& e : scene.entries) {
        out << "entry " << e.field_path.generic_string() << "\n";
        out << "rotation";
        for (int i = 0; i < 9; ++i) {
            out << ' ' << format_double(e.placement.rotation(i / 3, i % 3));
        }
        const Vec3& t = e.placement.translation;
        out << "\ntranslation " << format_double(t.x()) << ' ' << format_double(t.y()) << ' '
            << format_double(t.z()) << "\n";
        out << "scale " << format_double(e.placement.scale) << "\n";
    }
}

ComposedScene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scene file " + path.string());
    }
    const SceneFile file = parse_scene(in, path.string());
    std::vector<SceneEntry> entries;
    for (const auto& e : file.entries) {
        const auto field_path = e.field_path.is_absolute() ? e.field_path : path.parent_path() / e.field_path;
        entries.push_back({load_field(field_path), e.placement});
    }
    return ComposedScene(std::move(entries), file.background_index);
}

void save_scene(const std::filesystem::path& path, const SceneFile& scene) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_scene(out, scene);
}

}  // namespace fusedrf
