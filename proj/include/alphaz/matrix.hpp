#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <utility>

#include "errors.hpp"
#include "tolerances.hpp"

namespace alphaz {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

namespace detail {

// Scientific formatting for error messages; fixed-point would collapse the
// tiny magnitudes these diagnostics exist to expose.
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return std::string(buf);
}

}  // namespace detail

inline bool all_finite(const Mat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

// Dense complex matrix with validated entries.
class ComplexMatrix {
 public:
  ComplexMatrix(Mat m) : m_(std::move(m)) {  // NOLINT: implicit by design
    if (m_.rows() < 1 || m_.cols() < 1)
      throw DimensionMismatch("ComplexMatrix: rows and cols must be >= 1");
    if (!all_finite(m_)) throw InvalidParams("ComplexMatrix: non-finite entry");
  }
  const Mat& mat() const { return m_; }
  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }

 private:
  Mat m_;
};

// Ascending eigenvalues with unitary eigenvector columns.
struct EigSystem {
  RVec values;
  Mat vectors;
};

namespace detail {

// Shared eigensolver entry point; enforces the reconstruction contract.
inline EigSystem eig_hermitian(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(h);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("hermitian eigensolver failed to converge");
  EigSystem out{solver.eigenvalues(), solver.eigenvectors()};
  const double scale = h.norm();
  const Mat recon = out.vectors * out.values.cast<cplx>().asDiagonal() * out.vectors.adjoint();
  const double recon_defect = (recon - h).norm();
  if (recon_defect > tol::recon * std::max(1.0, scale))
    throw Error("eigendecomposition reconstruction defect " + std::to_string(recon_defect));
  const double unit_defect =
      (out.vectors.adjoint() * out.vectors - Mat::Identity(h.rows(), h.cols())).norm();
  if (unit_defect > tol::recon * std::max<double>(1.0, static_cast<double>(h.rows())))
    throw Error("eigenvector unitarity defect " + std::to_string(unit_defect));
  return out;
}

}  // namespace detail

// Square matrix whose hermiticity defect is within tolerance at construction;
// stored exactly symmetrized with an eagerly cached eigendecomposition.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const ComplexMatrix& m) : HermitianMatrix(m.mat()) {}
  explicit HermitianMatrix(const Mat& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("HermitianMatrix: matrix must be square");
    if (!all_finite(m)) throw InvalidParams("HermitianMatrix: non-finite entry");
    const double defect = (m - m.adjoint()).norm();
    if (defect > tol::hermit * std::max(1.0, m.norm()))
      throw InvalidParams("HermitianMatrix: hermiticity defect " + std::to_string(defect));
    m_ = 0.5 * (m + m.adjoint());
    eig_ = detail::eig_hermitian(m_);
  }

  const Mat& mat() const { return m_; }
  const EigSystem& eig() const { return eig_; }
  Eigen::Index dim() const { return m_.rows(); }
  double min_eigenvalue() const { return eig_.values(0); }
  double max_eigenvalue() const { return eig_.values(eig_.values.size() - 1); }

 private:
  Mat m_;
  EigSystem eig_;
};

// Hermitian matrix with all eigenvalues above the relative positivity floor.
class PositiveDefiniteMatrix {
 public:
  explicit PositiveDefiniteMatrix(HermitianMatrix h) : h_(std::move(h)) {
    const double floor = tol::pd_floor * std::max(1.0, h_.max_eigenvalue());
    if (h_.min_eigenvalue() <= floor)
      throw NotPositiveDefinite("min eigenvalue " + detail::sci(h_.min_eigenvalue()) +
                                " at or below floor " + detail::sci(floor));
  }
  explicit PositiveDefiniteMatrix(const Mat& m) : PositiveDefiniteMatrix(HermitianMatrix(m)) {}

  const Mat& mat() const { return h_.mat(); }
  const HermitianMatrix& herm() const { return h_; }
  const EigSystem& eig() const { return h_.eig(); }
  Eigen::Index dim() const { return h_.dim(); }

 private:
  HermitianMatrix h_;
};

}  // namespace alphaz
