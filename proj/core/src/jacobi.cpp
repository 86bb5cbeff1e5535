#include "covspec/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covspec/error.hpp"

namespace covspec {

namespace {

constexpr double kSingularFloor = 1e-10;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen jacobi_eigen(Matrix a, double tolerance, int max_sweeps) {
  const std::size_t n = a.rows();
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);

  int sweeps = 0;
  while (sweeps < max_sweeps && off_diagonal_norm(a) > tolerance * frob) {
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.sweeps = sweeps;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

TruncatedSvd truncated_svd(const Matrix& rows, std::size_t rank) {
  const std::size_t m = rows.rows();
  const std::size_t d = rows.cols();
  if (rank == 0 || rank >= std::min(m, d)) {
    fail(Errc::kInvalidRank, "rank must satisfy 1 <= r < min(M, d)");
  }

  const bool token_gram = m <= d;
  const std::size_t g = token_gram ? m : d;
  Matrix gram(g, g);
  if (token_gram) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        gram(i, j) = gram(j, i) = dot(rows.row(i), rows.row(j));
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      auto z = rows.row(i);
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) gram(a, b) += z[a] * z[b];
      }
    }
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < a; ++b) gram(a, b) = gram(b, a);
    }
  }

  const SymmetricEigen eig = jacobi_eigen(std::move(gram));
  TruncatedSvd out;
  out.rank = rank;
  out.singular_values.resize(g);
  for (std::size_t j = 0; j < g; ++j) out.singular_values[j] = std::sqrt(std::max(eig.values[j], 0.0));
  const double floor = kSingularFloor * (g > 0 ? out.singular_values[0] : 0.0);
  for (double& s : out.singular_values) {
    if (s < floor) s = 0.0;
  }

  out.left = Matrix(d, rank);
  out.right = Matrix(m, rank);
  for (std::size_t j = 0; j < rank; ++j) {
    const double sigma = out.singular_values[j];
    if (sigma == 0.0) continue;
    if (token_gram) {
      for (std::size_t i = 0; i < m; ++i) out.right(i, j) = eig.vectors(i, j);
      for (std::size_t i = 0; i < m; ++i) {
        auto z = rows.row(i);
        for (std::size_t a = 0; a < d; ++a) out.left(a, j) += eig.vectors(i, j) * z[a] / sigma;
      }
    } else {
      for (std::size_t a = 0; a < d; ++a) out.left(a, j) = eig.vectors(a, j);
      for (std::size_t i = 0; i < m; ++i) {
        double proj = 0.0;
        auto z = rows.row(i);
        for (std::size_t a = 0; a < d; ++a) proj += z[a] * eig.vectors(a, j);
        out.right(i, j) = proj / sigma;
      }
    }
  }
  return out;
}

}  // namespace covspec
