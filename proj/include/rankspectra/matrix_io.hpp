#pragma once

#include <filesystem>

#include "rankspectra/spectra.hpp"

namespace rankspectra {

/// CSV, rows = observations. A first line with any non-numeric field is
/// taken as a header. Throws ConfigError on ragged or malformed input.
DataMatrix read_csv_matrix(const std::filesystem::path& path);

/// Binary layout: uint32 n, uint32 p (little endian), then n*p float64
/// values in column-major order.
DataMatrix read_binary_matrix(const std::filesystem::path& path);
void write_binary_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& X);

/// Picks the reader from the extension (.bin for binary, CSV otherwise).
DataMatrix read_matrix(const std::filesystem::path& path);

/// First line "n,p", then one eigenvalue per line, descending.
EigenSpectrum read_eigenvalues(const std::filesystem::path& path);

}  // namespace rankspectra
