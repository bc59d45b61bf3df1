#pragma once

#include "klein/reps.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace klein {

inline constexpr int kFileVersion = 1;

// Representation file: a JSON object
//   {"version": 1, "genus": g,
//    "matrices": [[[re, im], [re, im], [re, im], [re, im]], ...],
//    "metadata": [tag, ...]}
// with the 2g generator images a_1, b_1, ..., a_g, b_g in row-major order
// and every real number written as a decimal string of 17 significant
// digits, so write -> read -> write reproduces the bytes.
std::string to_file_text(const SurfaceRepresentation& rep);
void write_representation(std::ostream& out, const SurfaceRepresentation& rep);

// Parses and validates: entries must parse completely to finite doubles,
// matrices must be unimodular and the relator defect must be at most
// kInputRelatorTolerance. Throws ParseError or InvalidInput.
SurfaceRepresentation from_file_text(std::string_view text);
SurfaceRepresentation read_representation(std::istream& in);

// "%.17g" of x (negative zero written as "0"), and its strict inverse
// (ParseError unless the whole string is a finite decimal).
std::string format_decimal(double x);
double parse_decimal(std::string_view s);

} // namespace klein
