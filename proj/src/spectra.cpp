#include "rankspectra/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rankspectra/errors.hpp"

namespace rankspectra {

namespace {

Eigen::MatrixXd prepared(const DataMatrix& X, bool centered) {
    Eigen::MatrixXd Y = X.values();
    if (centered) {
        Y.rowwise() -= Y.colwise().mean();
    }
    return Y;
}

double divisor_value(std::size_t n, Divisor d) {
    return d == Divisor::n_minus_1 ? static_cast<double>(n - 1) : static_cast<double>(n);
}

std::vector<double> spectrum_of(const Eigen::MatrixXd& Y, double div) {
    const auto n = Y.rows();
    const auto p = Y.cols();
    std::vector<double> ev;
    if (p <= n) {
        ev = symmetric_eigenvalues_desc((Y.transpose() * Y) / div);
    } else {
        ev = symmetric_eigenvalues_desc((Y * Y.transpose()) / div);
        ev.resize(static_cast<std::size_t>(p), 0.0);
    }
    return ev;
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 2 || values_.cols() < 1) {
        throw DomainError("DataMatrix: need n >= 2 and p >= 1");
    }
    if (!values_.allFinite()) {
        throw DomainError("DataMatrix: non-finite entry");
    }
}

EigenSpectrum::EigenSpectrum(std::vector<double> eigenvalues, std::size_t n, std::size_t p,
                             SpectrumSource source)
    : values_(std::move(eigenvalues)), n_(n), p_(p), source_(source) {
    if (p_ == 0 || values_.size() != p_) {
        throw DomainError("EigenSpectrum: expected " + std::to_string(p_) + " eigenvalues, got " +
                          std::to_string(values_.size()));
    }
    for (std::size_t j = 0; j < p_; ++j) {
        if (!std::isfinite(values_[j]) || values_[j] < 0.0) {
            throw DomainError("EigenSpectrum: eigenvalues must be finite and >= 0");
        }
        if (j > 0 && values_[j] > values_[j - 1]) {
            throw DomainError("EigenSpectrum: eigenvalues must be descending");
        }
    }
    suffix_.assign(p_ + 1, 0.0);
    for (std::size_t r = p_; r-- > 0;) {
        suffix_[r] = suffix_[r + 1] + values_[r];
    }
}

EigenSpectrum EigenSpectrum::scaled(double s) const {
    std::vector<double> v(values_);
    for (auto& x : v) {
        x *= s;
    }
    return EigenSpectrum(std::move(v), n_, p_, source_);
}

std::vector<double> symmetric_eigenvalues_desc(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver did not converge");
    }
    const auto& ev = solver.eigenvalues();
    std::vector<double> out(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        out[static_cast<std::size_t>(i)] = std::max(0.0, ev[ev.size() - 1 - i]);
    }
    return out;
}

EigenSpectrum cov_eigenvalues(const DataMatrix& X, bool centered, Divisor divisor) {
    const auto Y = prepared(X, centered);
    return EigenSpectrum(spectrum_of(Y, divisor_value(X.n(), divisor)), X.n(), X.p(),
                         SpectrumSource::covariance);
}

EigenSpectrum corr_eigenvalues(const DataMatrix& X) {
    Eigen::MatrixXd Y = prepared(X, true);
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
        const double ss = Y.col(j).squaredNorm();
        if (!(ss > 0.0)) {
            throw DegenerateColumnError("corr_eigenvalues: column " + std::to_string(j) + " has zero variance");
        }
        Y.col(j) /= std::sqrt(ss);
    }
    // columns now have unit norm, so Y^T Y is the correlation matrix
    return EigenSpectrum(spectrum_of(Y, 1.0), X.n(), X.p(), SpectrumSource::correlation);
}

std::vector<double> cov_diagonal(const DataMatrix& X, bool centered, Divisor divisor) {
    const auto Y = prepared(X, centered);
    const double div = divisor_value(X.n(), divisor);
    std::vector<double> d(X.p());
    for (std::size_t j = 0; j < X.p(); ++j) {
        d[j] = Y.col(static_cast<Eigen::Index>(j)).squaredNorm() / div;
    }
    return d;
}

double tail_mean(const EigenSpectrum& spec, std::size_t r) {
    if (r >= spec.p()) {
        throw RangeError("tail_mean: r = " + std::to_string(r) + " must be < p = " + std::to_string(spec.p()));
    }
    return spec.tail_sums()[r] / static_cast<double>(spec.p() - r);
}

}  // namespace rankspectra
