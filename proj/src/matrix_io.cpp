#include "rankspectra/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rankspectra/csv.hpp"
#include "rankspectra/errors.hpp"

namespace rankspectra {

namespace {

bool to_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return !s.empty() && ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string> nonempty_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") != std::string::npos) {
            lines.push_back(line);
        }
    }
    return lines;
}

}  // namespace

DataMatrix read_csv_matrix(const std::filesystem::path& path) {
    const auto lines = nonempty_lines(read_file(path));
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto fields = csv_split(lines[i]);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            numeric = numeric && to_double(fields[j], row[j]);
        }
        if (!numeric) {
            if (i == 0) {
                continue;  // header
            }
            throw ConfigError(path.string() + ":" + std::to_string(i + 1) + ": non-numeric field");
        }
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            throw ConfigError(path.string() + ":" + std::to_string(i + 1) + ": expected " +
                              std::to_string(width) + " fields");
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2 || width == 0) {
        throw ConfigError(path.string() + ": need at least 2 data rows");
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return DataMatrix(std::move(X));
}

DataMatrix read_binary_matrix(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 8) {
        throw ConfigError(path.string() + ": truncated header");
    }
    std::uint32_t n = 0;
    std::uint32_t p = 0;
    std::memcpy(&n, bytes.data(), 4);
    std::memcpy(&p, bytes.data() + 4, 4);
    const std::size_t count = static_cast<std::size_t>(n) * p;
    if (bytes.size() != 8 + count * sizeof(double)) {
        throw ConfigError(path.string() + ": size does not match header (" + std::to_string(n) + " x " +
                          std::to_string(p) + ")");
    }
    Eigen::MatrixXd X(n, p);
    std::memcpy(X.data(), bytes.data() + 8, count * sizeof(double));
    if (!X.allFinite()) {
        throw ConfigError(path.string() + ": non-finite value");
    }
    return DataMatrix(std::move(X));
}

void write_binary_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& X) {
    std::string bytes(8 + static_cast<std::size_t>(X.size()) * sizeof(double), '\0');
    const auto n = static_cast<std::uint32_t>(X.rows());
    const auto p = static_cast<std::uint32_t>(X.cols());
    std::memcpy(bytes.data(), &n, 4);
    std::memcpy(bytes.data() + 4, &p, 4);
    std::memcpy(bytes.data() + 8, X.data(), static_cast<std::size_t>(X.size()) * sizeof(double));
    write_file_atomic(path, bytes);
}

DataMatrix read_matrix(const std::filesystem::path& path) {
    if (path.extension() == ".bin") {
        return read_binary_matrix(path);
    }
    return read_csv_matrix(path);
}

EigenSpectrum read_eigenvalues(const std::filesystem::path& path) {
    const auto lines = nonempty_lines(read_file(path));
    if (lines.empty()) {
        throw ConfigError(path.string() + ": empty eigenvalue file");
    }
    const auto header = csv_split(lines[0]);
    double n = 0.0;
    double p = 0.0;
    if (header.size() != 2 || !to_double(header[0], n) || !to_double(header[1], p) || n < 1 || p < 1 ||
        n != std::floor(n) || p != std::floor(p)) {
        throw ConfigError(path.string() + ": first line must be 'n,p'");
    }
    std::vector<double> ev;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        double v = 0.0;
        if (!to_double(lines[i], v)) {
            throw ConfigError(path.string() + ":" + std::to_string(i + 1) + ": bad eigenvalue");
        }
        ev.push_back(v);
    }
    try {
        return EigenSpectrum(std::move(ev), static_cast<std::size_t>(n), static_cast<std::size_t>(p));
    } catch (const DomainError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace rankspectra
