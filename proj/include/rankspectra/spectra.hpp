#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rankspectra {

/// n x p data matrix, rows are observations. n >= 2, p >= 1, finite entries.
class DataMatrix {
public:
    explicit DataMatrix(Eigen::MatrixXd values);

    const Eigen::MatrixXd& values() const noexcept { return values_; }
    std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t p() const noexcept { return static_cast<std::size_t>(values_.cols()); }

private:
    Eigen::MatrixXd values_;
};

enum class SpectrumSource { covariance, correlation, external };

/// Sample eigenvalues in descending order with their (n, p).
class EigenSpectrum {
public:
    /// Validates length p, descending order and nonnegativity.
    EigenSpectrum(std::vector<double> eigenvalues, std::size_t n, std::size_t p,
                  SpectrumSource source = SpectrumSource::external);

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t j) const noexcept { return values_[j]; }  // 0-based
    std::size_t n() const noexcept { return n_; }
    std::size_t p() const noexcept { return p_; }
    SpectrumSource source() const noexcept { return source_; }

    /// suffix[r] = sum_{j > r} lambda_j (1-based j), r = 0..p.
    const std::vector<double>& tail_sums() const noexcept { return suffix_; }

    EigenSpectrum scaled(double s) const;

private:
    std::vector<double> values_;
    std::size_t n_;
    std::size_t p_;
    SpectrumSource source_;
    std::vector<double> suffix_;
};

enum class Divisor { n_minus_1, n };

/// Eigenvalues of S_n = X_c^T X_c / divisor, zero-padded to length p. Uses
/// the n x n Gram matrix when p > n.
EigenSpectrum cov_eigenvalues(const DataMatrix& X, bool centered = true,
                              Divisor divisor = Divisor::n_minus_1);

/// Eigenvalues of the sample correlation matrix.
EigenSpectrum corr_eigenvalues(const DataMatrix& X);

/// Diagonal of S_n with the same conventions as cov_eigenvalues.
std::vector<double> cov_diagonal(const DataMatrix& X, bool centered = true,
                                 Divisor divisor = Divisor::n_minus_1);

/// Mean of the trailing p - r eigenvalues.
double tail_mean(const EigenSpectrum& spec, std::size_t r);

/// Descending eigenvalues of a symmetric matrix, negatives clamped to zero.
std::vector<double> symmetric_eigenvalues_desc(const Eigen::MatrixXd& A);

}  // namespace rankspectra
