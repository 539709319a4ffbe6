#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sketchrec/types.hpp"

namespace sketchrec {

// Matrix CSV: one row per line, comma separated, '.' decimal point, no header.
// Values are written in shortest round-trip form, so read(write(M)) == M.

/// Parses matrix CSV text. `source` names the input in error messages.
/// Throws ParseError (with the 1-based line) on malformed, ragged or
/// non-finite input.
DenseMatrix parse_matrix_csv(std::string_view text, const std::string& source = "<input>");
DenseMatrix read_matrix_csv(const std::filesystem::path& path);

std::string format_matrix_csv(const DenseMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);

/// Shortest decimal text that reads back to exactly `value`.
std::string format_double(double value);

}  // namespace sketchrec
