#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "rankspectra/errors.hpp"
#include "rankspectra/h_spec.hpp"
#include "rankspectra/rmt_core.hpp"
#include "rankspectra/spectra.hpp"

using namespace rankspectra;

namespace {

Eigen::MatrixXd gaussian(std::size_t n, std::size_t p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            X(i, j) = z(rng);
        }
    }
    return X;
}

// Plain p x p covariance built entrywise, for comparison with the library.
Eigen::MatrixXd covariance_reference(const Eigen::MatrixXd& X) {
    const auto n = X.rows();
    const auto p = X.cols();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            mean(j) += X(i, j);
        }
        mean(j) /= static_cast<double>(n);
    }
    Eigen::MatrixXd S(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += (X(i, a) - mean(a)) * (X(i, b) - mean(b));
            }
            S(a, b) = acc / static_cast<double>(n - 1);
        }
    }
    return S;
}

}  // namespace

TEST(DataMatrix, RejectsInvalidShapesAndValues) {
    EXPECT_THROW(DataMatrix(Eigen::MatrixXd::Zero(1, 3)), DomainError);
    EXPECT_THROW(DataMatrix(Eigen::MatrixXd::Zero(3, 0)), DomainError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 2);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(DataMatrix{bad}, DomainError);
}

TEST(EigenSpectrum, ValidatesOrderAndLength) {
    EXPECT_THROW(EigenSpectrum({1.0, 2.0}, 10, 2), DomainError);
    EXPECT_THROW(EigenSpectrum({2.0, 1.0}, 10, 3), DomainError);
    EXPECT_THROW(EigenSpectrum({2.0, -1.0}, 10, 2), DomainError);
    const EigenSpectrum s({4.0, 2.0, 1.0, 1.0}, 10, 4);
    EXPECT_EQ(s.tail_sums(), (std::vector<double>{8.0, 4.0, 2.0, 1.0, 0.0}));
    EXPECT_DOUBLE_EQ(s.scaled(2.0)[0], 8.0);
}

TEST(CovEigenvalues, HandExample) {
    Eigen::MatrixXd X(3, 2);
    X << 1, 0, -1, 0, 0, 0;
    const auto s = cov_eigenvalues(DataMatrix(X));
    ASSERT_EQ(s.p(), 2u);
    EXPECT_NEAR(s[0], 1.0, 1e-14);
    EXPECT_NEAR(s[1], 0.0, 1e-14);
    EXPECT_EQ(s.source(), SpectrumSource::covariance);
}

TEST(CovEigenvalues, ConstantRowsGiveZeros) {
    Eigen::MatrixXd X(5, 3);
    for (int i = 0; i < 5; ++i) {
        X.row(i) << 1.5, -2.0, 7.0;
    }
    const auto s = cov_eigenvalues(DataMatrix(X));
    for (double v : s.values()) {
        EXPECT_NEAR(v, 0.0, 1e-12);
    }
}

TEST(CovEigenvalues, MatchesEntrywiseCovariance) {
    const auto X = gaussian(40, 12, 5);
    const auto ref = symmetric_eigenvalues_desc(covariance_reference(X));
    const auto s = cov_eigenvalues(DataMatrix(X));
    for (std::size_t j = 0; j < ref.size(); ++j) {
        EXPECT_NEAR(s[j], ref[j], 1e-10);
    }
}

TEST(CovEigenvalues, GramSideAgreesWithCovarianceSide) {
    const auto X = gaussian(50, 80, 11);
    const auto gram = cov_eigenvalues(DataMatrix(X));
    const auto full = symmetric_eigenvalues_desc(covariance_reference(X));
    ASSERT_EQ(gram.p(), 80u);
    for (std::size_t j = 0; j < 80; ++j) {
        EXPECT_NEAR(gram[j], full[j], 1e-10) << j;
    }
    // centering removes one dimension: at most n - 1 positive values
    for (std::size_t j = 49; j < 80; ++j) {
        EXPECT_EQ(gram[j], 0.0);
    }
}

TEST(CovEigenvalues, TraceIsPreserved) {
    for (auto [n, p] : {std::pair{30, 10}, std::pair{10, 30}}) {
        const auto X = gaussian(n, p, 17);
        const auto s = cov_eigenvalues(DataMatrix(X));
        const double sum = std::accumulate(s.values().begin(), s.values().end(), 0.0);
        EXPECT_NEAR(sum, covariance_reference(X).trace(), 1e-8 * sum);
    }
}

TEST(CovEigenvalues, InvariantUnderRowPermutation) {
    const auto X = gaussian(30, 8, 23);
    std::vector<int> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937(4));
    Eigen::MatrixXd Y(30, 8);
    for (int i = 0; i < 30; ++i) {
        Y.row(i) = X.row(perm[i]);
    }
    const auto a = cov_eigenvalues(DataMatrix(X));
    const auto b = cov_eigenvalues(DataMatrix(Y));
    for (std::size_t j = 0; j < 8; ++j) {
        EXPECT_NEAR(a[j], b[j], 1e-10);
    }
}

TEST(CovEigenvalues, UncenteredDivisorN) {
    Eigen::MatrixXd X(2, 1);
    X << 1.0, 3.0;
    EXPECT_NEAR(cov_eigenvalues(DataMatrix(X), false, Divisor::n)[0], 5.0, 1e-14);
    EXPECT_NEAR(cov_eigenvalues(DataMatrix(X))[0], 2.0, 1e-14);
    const auto d = cov_diagonal(DataMatrix(X), false, Divisor::n);
    EXPECT_NEAR(d[0], 5.0, 1e-14);
}

TEST(CorrEigenvalues, SumToDimension) {
    const auto s = corr_eigenvalues(DataMatrix(gaussian(20, 35, 3)));
    EXPECT_NEAR(std::accumulate(s.values().begin(), s.values().end(), 0.0), 35.0, 1e-8);
    EXPECT_EQ(s.source(), SpectrumSource::correlation);
}

TEST(CorrEigenvalues, NearOneForIndependentColumns) {
    const auto s = corr_eigenvalues(DataMatrix(gaussian(10000, 5, 8)));
    for (double v : s.values()) {
        EXPECT_NEAR(v, 1.0, 0.1);
    }
}

TEST(CorrEigenvalues, IdenticalColumns) {
    auto X = gaussian(25, 2, 9);
    X.col(1) = X.col(0);
    const auto s = corr_eigenvalues(DataMatrix(X));
    EXPECT_NEAR(s[0], 2.0, 1e-12);
    EXPECT_NEAR(s[1], 0.0, 1e-12);
}

TEST(CorrEigenvalues, RejectsConstantColumn) {
    auto X = gaussian(25, 3, 9);
    X.col(2).setConstant(4.0);
    EXPECT_THROW(corr_eigenvalues(DataMatrix(X)), DegenerateColumnError);
}

TEST(TailMean, Examples) {
    const EigenSpectrum s({4.0, 2.0, 1.0, 1.0}, 10, 4);
    EXPECT_DOUBLE_EQ(tail_mean(s, 2), 1.0);
    EXPECT_DOUBLE_EQ(tail_mean(s, 0), 2.0);
    EXPECT_DOUBLE_EQ(tail_mean(s, 3), 1.0);
    EXPECT_THROW(tail_mean(s, 4), RangeError);
}

TEST(CovEigenvalues, NoiseSpectrumFollowsMarchenkoPastur) {
    // Pure noise with population eigenvalues drawn from H1, c = 0.25.
    const std::size_t n = 2000;
    const std::size_t p = 500;
    const auto H = parse_h_spec("H1");
    std::mt19937_64 rng(31);
    const auto pop = H.sample(rng, p);
    auto X = gaussian(n, p, 32);
    for (std::size_t j = 0; j < p; ++j) {
        X.col(static_cast<Eigen::Index>(j)) *= std::sqrt(pop[j]);
    }
    auto s = cov_eigenvalues(DataMatrix(X));
    std::vector<double> ev(s.values().begin(), s.values().end());
    std::sort(ev.begin(), ev.end());

    const MPModel m(0.25, H.distribution());
    const double b = upper_edge(m).edge;
    const int cells = 300;
    const double h = b * 1.05 / cells;
    std::vector<double> grid(cells + 1);
    std::vector<double> cdf(cells + 1, 0.0);
    double prev = 0.0;
    for (int i = 1; i <= cells; ++i) {
        grid[i] = i * h;
        const double dens = mp_density(m, grid[i]);
        cdf[i] = cdf[i - 1] + 0.5 * (prev + dens) * h;
        prev = dens;
    }
    double ks = 0.0;
    for (int i = 0; i <= cells; ++i) {
        const double emp = static_cast<double>(std::upper_bound(ev.begin(), ev.end(), grid[i]) - ev.begin()) / p;
        ks = std::max(ks, std::abs(emp - cdf[i] / cdf[cells]));
    }
    EXPECT_LT(ks, 0.05);
    EXPECT_NEAR(cdf[cells], 1.0, 0.01);
    EXPECT_NEAR(ev.back(), b, 0.05 * b);
}
