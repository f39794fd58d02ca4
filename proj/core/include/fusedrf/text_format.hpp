#pragma once

// Shared tokenizer for the line-oriented text formats (cameras, scenes, scene specs).
// '#' starts a comment; blank lines are skipped; tokens are whitespace separated.

#include "fusedrf/errors.hpp"
#include "fusedrf/math.hpp"

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace fusedrf::text {

struct Line {
    std::size_t number = 0;
    std::vector<std::string> tokens;
};

/// Reads all non-empty, comment-stripped lines.
std::vector<Line> tokenize(std::istream& in);

double to_double(const std::string& source, const Line& line, std::size_t index);
long long to_int(const std::string& source, const Line& line, std::size_t index);
/// Reads tokens[index .. index+2] as a vector.
Vec3 to_vec3(const std::string& source, const Line& line, std::size_t index);
/// Throws unless the line has exactly `count` tokens.
void expect_count(const std::string& source, const Line& line, std::size_t count);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double value);

}  // namespace fusedrf::text
