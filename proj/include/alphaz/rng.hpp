#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "linalg.hpp"
#include "matrix.hpp"

namespace alphaz {

// Seeded generator with a hand-rolled Box-Muller normal so that streams depend
// only on the mt19937_64 specification, not on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * v);
  }

  cplx cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Standard complex Gaussian (Ginibre) matrix.
inline Mat ginibre(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Mat g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = rng.cnormal();
  return g;
}

inline Mat random_hermitian(Rng& rng, Eigen::Index n) {
  const Mat g = ginibre(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal phases
// folded into Q so the result does not depend on QR sign conventions.
inline Mat random_unitary(Rng& rng, Eigen::Index n) {
  const Mat g = ginibre(rng, n, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0) ? d / a : cplx(1.0, 0.0);
  }
  return q;
}

// Positive definite matrix with eigenvalues remapped uniformly into [lo, hi].
inline Mat random_pd(Rng& rng, Eigen::Index n, double lo = 0.5, double hi = 2.0) {
  const Mat u = random_unitary(rng, n);
  RVec lam(n);
  for (Eigen::Index i = 0; i < n; ++i) lam(i) = lo + (hi - lo) * rng.uniform();
  return u * lam.cast<cplx>().asDiagonal() * u.adjoint();
}

// Invertible matrix with singular values remapped uniformly into [lo, hi],
// keeping condition numbers bounded for identity checks.
inline Mat random_invertible(Rng& rng, Eigen::Index n, double lo = 0.5, double hi = 2.0) {
  const Mat u = random_unitary(rng, n);
  const Mat v = random_unitary(rng, n);
  RVec sv(n);
  for (Eigen::Index i = 0; i < n; ++i) sv(i) = lo + (hi - lo) * rng.uniform();
  return u * sv.cast<cplx>().asDiagonal() * v.adjoint();
}

}  // namespace alphaz
