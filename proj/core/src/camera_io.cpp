#include "fusedrf/camera_io.hpp"

#include "fusedrf/text_format.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace fusedrf {

std::vector<Camera> read_cameras(std::istream& in, const std::string& source) {
    std::vector<Camera> cameras;
    const auto lines = text::tokenize(in);

    bool open = false;
    Camera cam;
    std::map<std::string, bool> seen;
    std::size_t open_line = 0;
    for (const auto& line : lines) {
        const std::string& key = line.tokens.front();
        if (key == "camera") {
            text::expect_count(source, line, 1);
            if (open) {
                throw ParseError(source, line.number, "'camera' before 'end' of previous record");
            }
            open = true;
            open_line = line.number;
            cam = Camera{};
            seen.clear();
            continue;
        }
        if (!open) {
            throw ParseError(source, line.number, "'" + key + "' outside a camera record");
        }
        if (key == "end") {
            text::expect_count(source, line, 1);
            for (const char* required :
                 {"fx", "fy", "cx", "cy", "width", "height", "rotation", "translation"}) {
                if (!seen.count(required)) {
                    throw ParseError(source, line.number,
                                     std::string("camera record missing '") + required + "'");
                }
            }
            try {
                validate_camera(cam);
            } catch (const std::invalid_argument& e) {
                throw ParseError(source, line.number, e.what());
            }
            cameras.push_back(cam);
            open = false;
            continue;
        }
        if (seen.count(key)) {
            throw ParseError(source, line.number, "duplicate '" + key + "'");
        }
        if (key == "fx" || key == "fy" || key == "cx" || key == "cy") {
            text::expect_count(source, line, 2);
            const double v = text::to_double(source, line, 1);
            (key == "fx" ? cam.fx : key == "fy" ? cam.fy : key == "cx" ? cam.cx : cam.cy) = v;
        } else if (key == "width" || key == "height") {
            text::expect_count(source, line, 2);
            const auto v = text::to_int(source, line, 1);
            if (v <= 0 || v > 1 << 16) {
                throw ParseError(source, line.number, key + " out of range");
            }
            (key == "width" ? cam.width : cam.height) = static_cast<int>(v);
        } else if (key == "rotation") {
            text::expect_count(source, line, 10);
            for (int i = 0; i < 9; ++i) {
                cam.rotation(i / 3, i % 3) = text::to_double(source, line, 1 + i);
            }
        } else if (key == "translation") {
            text::expect_count(source, line, 4);
            cam.translation = text::to_vec3(source, line, 1);
        } else {
            throw ParseError(source, line.number, "unknown camera field '" + key + "'");
        }
        seen[key] = true;
    }
    if (open) {
        throw ParseError(source, open_line, "camera record not closed with 'end'");
    }
    return cameras;
}

void write_cameras(std::ostream& out, const std::vector<Camera>& cameras) {
    using text::format_double;
    out << "# fusedrf cameras\n";
    for (const auto& c : cameras) {
        out << "camera\n";
        out << "fx " << format_double(c.fx) << "\n";
        out << "fy " << format_double(c.fy) << "\n";
        out << "cx " << format_double(c.cx) << "\n";
        out << "cy " << format_double(c.cy) << "\n";
        out << "width " << c.width << "\n";
        out << "height " << c.height << "\n";
        out << "rotation";
        for (int i = 0; i < 9; ++i) {
            out << ' ' << format_double(c.rotation(i / 3, i % 3));
        }
        out << "\ntranslation " << format_double(c.translation.x()) << ' '
            << format_double(c.translation.y()) << ' ' << format_double(c.translation.z()) << "\n";
        out << "end\n";
    }
}

std::vector<Camera> load_cameras(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open camera file " + path.string());
    }
    return read_cameras(in, path.string());
}

void save_cameras(const std::filesystem::path& path, const std::vector<Camera>& cameras) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_cameras(out, cameras);
}

}  // namespace fusedrf
