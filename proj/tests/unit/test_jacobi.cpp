#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "covspec/error.hpp"
#include "covspec/jacobi.hpp"
#include "covspec/rng.hpp"

namespace covspec {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, SeededRng& rng) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& x : m.row(r)) x = rng.next_normal();
  }
  return m;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  }
  return e;
}

TEST(JacobiEigen, MatchesEigenSelfAdjointSolver) {
  SeededRng rng(1, "jacobi");
  for (std::size_t n : {1u, 2u, 5u, 17u, 40u}) {
    const Matrix b = random_matrix(n, n, rng);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = b(i, j) + b(j, i);
    }
    const SymmetricEigen got = jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(a));
    const auto& ev = ref.eigenvalues();
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_NEAR(got.values[j], ev(static_cast<Eigen::Index>(n - 1 - j)), 1e-9) << "n=" << n;
    }
    for (std::size_t j = 1; j < n; ++j) EXPECT_GE(got.values[j - 1], got.values[j]);
    // A v = lambda v and orthonormal columns.
    const Eigen::MatrixXd v = to_eigen(got.vectors);
    const Eigen::MatrixXd av = to_eigen(a) * v;
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      EXPECT_LT((av.col(jj) - got.values[j] * v.col(jj)).norm(), 1e-9);
    }
    EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-10);
  }
}

TEST(JacobiEigen, DiagonalInputNeedsNoSweeps) {
  Matrix a(3, 3);
  a(0, 0) = 1;
  a(1, 1) = 5;
  a(2, 2) = 3;
  const auto e = jacobi_eigen(a);
  EXPECT_EQ(e.values, (std::vector<double>{5, 3, 1}));
  EXPECT_EQ(e.sweeps, 0);
}

TEST(TruncatedSvd, SingularValuesMatchEigen) {
  SeededRng rng(2, "svd");
  for (auto [m, d] : {std::pair<std::size_t, std::size_t>{10, 6}, {6, 10}, {32, 32}, {64, 20}}) {
    const Matrix z = random_matrix(m, d, rng);
    const std::size_t r = std::min(m, d) - 1;
    const TruncatedSvd svd = truncated_svd(z, r);
    Eigen::JacobiSVD<Eigen::MatrixXd> ref(to_eigen(z));
    const auto& sv = ref.singularValues();
    ASSERT_EQ(svd.singular_values.size(), static_cast<std::size_t>(sv.size()));
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
      EXPECT_NEAR(svd.singular_values[static_cast<std::size_t>(j)], sv(j), 1e-9 * sv(0));
    }
    EXPECT_EQ(svd.left.rows(), d);
    EXPECT_EQ(svd.left.cols(), r);
    EXPECT_EQ(svd.right.rows(), m);
    EXPECT_EQ(svd.right.cols(), r);
    // Z^T v_j = sigma_j u_j for the retained pairs.
    const Eigen::MatrixXd zt = to_eigen(z).transpose();
    const Eigen::MatrixXd u = to_eigen(svd.left);
    const Eigen::MatrixXd v = to_eigen(svd.right);
    for (std::size_t j = 0; j < r; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      EXPECT_LT((zt * v.col(jj) - svd.singular_values[j] * u.col(jj)).norm(), 1e-8);
    }
  }
}

TEST(TruncatedSvd, RankOutOfRange) {
  SeededRng rng(3, "svd");
  const Matrix z = random_matrix(5, 4, rng);
  EXPECT_THROW(truncated_svd(z, 4), Error);
  EXPECT_THROW(truncated_svd(z, 0), Error);
}

}  // namespace
}  // namespace covspec
