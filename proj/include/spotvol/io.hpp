#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "spotvol/path.hpp"

/**
 * CSV interchange (UTF-8, LF line endings).
 *
 *   path:      t,<label1>,...,<labelD>      one row per grid time
 *   series:    t,u,v,sigma_uv               upper triangle only, u <= v, 1-based
 *   spectrum:  t,rank,lambda                rank 1 is the largest eigenvalue
 *
 * Reals are written in shortest round-trip form, so write-then-read is
 * bit-exact.
 */
namespace spotvol::io {

std::string format_real(double value);

/// Parses a full field as a double; ParseError(line) on anything else.
double parse_real(std::string_view field, std::size_t line);

/// Throws ParseError (malformed row, with its line number), ValidationError
/// (irregular grid, non-finite value) or InsufficientDataError (< 3 rows).
PathSample read_path_csv(std::istream& source);
void write_path_csv(const PathSample& path, std::ostream& sink);

/// Writes the matrix file and its companion spectrum file. IoError if a
/// sink goes bad.
void write_series_csv(const SpotMatrixSeries& series, std::ostream& matrix_sink,
                      std::ostream& spectrum_sink);

/// Reads a matrix file back, mirroring the upper triangle. Spectra are
/// recomputed; grid indices are left empty.
SpotMatrixSeries read_series_csv(std::istream& matrix_source);

PathSample read_path_file(const std::filesystem::path& file);
void write_path_file(const PathSample& path, const std::filesystem::path& file);

/// Writes <stem>_sigma.csv and <stem>_spectrum.csv next to each other.
void write_series_files(const SpotMatrixSeries& series, const std::filesystem::path& stem);

}  // namespace spotvol::io
