#include "fusedrf/text_format.hpp"

#include <charconv>
#include <sstream>

namespace fusedrf::text {

std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> lines;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        std::istringstream ss(raw);
        Line line{number, {}};
        for (std::string tok; ss >> tok;) {
            line.tokens.push_back(tok);
        }
        if (!line.tokens.empty()) {
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

double to_double(const std::string& source, const Line& line, std::size_t index) {
    if (index >= line.tokens.size()) {
        throw ParseError(source, line.number, "missing number after '" + line.tokens.front() + "'");
    }
    const std::string& tok = line.tokens[index];
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used == tok.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ParseError(source, line.number, "expected a number, got '" + tok + "'");
}

long long to_int(const std::string& source, const Line& line, std::size_t index) {
    if (index >= line.tokens.size()) {
        throw ParseError(source, line.number, "missing integer after '" + line.tokens.front() + "'");
    }
    const std::string& tok = line.tokens[index];
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(source, line.number, "expected an integer, got '" + tok + "'");
    }
    return v;
}

Vec3 to_vec3(const std::string& source, const Line& line, std::size_t index) {
    return {to_double(source, line, index), to_double(source, line, index + 1),
            to_double(source, line, index + 2)};
}

void expect_count(const std::string& source, const Line& line, std::size_t count) {
    if (line.tokens.size() != count) {
        throw ParseError(source, line.number,
                         "'" + line.tokens.front() + "' expects " + std::to_string(count - 1) +
                             " value(s), got " + std::to_string(line.tokens.size() - 1));
    }
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace fusedrf::text
