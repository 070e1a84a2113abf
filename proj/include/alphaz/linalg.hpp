#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "matrix.hpp"

namespace alphaz {

inline EigSystem hermitian_eig(const HermitianMatrix& m) { return m.eig(); }

namespace detail {

inline Mat from_eig(const EigSystem& e, const RVec& mapped) {
  return e.vectors * mapped.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

// Power of a matrix already validated positive definite.
inline Mat power_spectrum_pd(const EigSystem& e, double s) {
  RVec mapped(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) mapped(i) = std::pow(e.values(i), s);
  return from_eig(e, mapped);
}

// Power of a positive semidefinite matrix, s >= 0; eigenvalues pushed below
// zero by roundoff are clamped to zero first.
inline Mat power_psd(const Mat& a, double s) {
  if (s < 0) throw InvalidParams("power_psd: exponent must be >= 0");
  const EigSystem e = eig_hermitian(0.5 * (a + a.adjoint()));
  RVec mapped(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double lam = std::max(e.values(i), 0.0);
    mapped(i) = (lam == 0.0 && s == 0.0) ? 1.0 : std::pow(lam, s);
  }
  return from_eig(e, mapped);
}

inline double trace_power_psd(const Mat& a, double s) {
  const EigSystem e = eig_hermitian(0.5 * (a + a.adjoint()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    acc += std::pow(std::max(e.values(i), 0.0), s);
  return acc;
}

inline Mat log_pd(const Mat& a) {
  const EigSystem e = eig_hermitian(0.5 * (a + a.adjoint()));
  RVec mapped(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) <= 0.0) throw NotPositiveDefinite("log of non-positive eigenvalue");
    mapped(i) = std::log(e.values(i));
  }
  return from_eig(e, mapped);
}

// Singular values of K as sqrt of the spectrum of K*K, ascending.
inline RVec singular_values(const Mat& k) {
  const EigSystem e = eig_hermitian((k.adjoint() * k).eval());
  RVec sv(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) sv(i) = std::sqrt(std::max(e.values(i), 0.0));
  return sv;
}

inline void require_invertible(const Mat& k, const char* who) {
  if (k.rows() != k.cols()) throw DimensionMismatch(std::string(who) + ": matrix must be square");
  const RVec sv = singular_values(k);
  if (sv(0) <= tol::pd_floor * sv(sv.size() - 1))
    throw Singular(std::string(who) + ": smallest singular value " + std::to_string(sv(0)) +
                   " below relative floor");
}

}  // namespace detail

inline PositiveDefiniteMatrix mat_power(const PositiveDefiniteMatrix& a, double s) {
  if (!std::isfinite(s)) throw InvalidParams("mat_power: exponent must be finite");
  return PositiveDefiniteMatrix(detail::power_spectrum_pd(a.eig(), s));
}

// Support-convention power: eigenvalues at or below support_cut * max eigenvalue
// are treated as exact zeros and stay zero for any exponent; the rest are raised
// to s. For full-rank positive input this agrees with mat_power.
inline Mat pseudo_power(const Mat& a, double s, double rank_cut = tol::support_cut) {
  const EigSystem e = detail::eig_hermitian(0.5 * (a + a.adjoint()));
  const double top = std::max(0.0, e.values(e.values.size() - 1));
  RVec mapped(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double lam = e.values(i);
    mapped(i) = (lam <= rank_cut * std::max(top, 1e-300)) ? 0.0 : std::pow(lam, s);
  }
  return detail::from_eig(e, mapped);
}

// |K| = (K*K)^{1/2}.
inline PositiveDefiniteMatrix modulus(const ComplexMatrix& k) {
  detail::require_invertible(k.mat(), "modulus");
  return PositiveDefiniteMatrix(detail::power_psd((k.mat().adjoint() * k.mat()).eval(), 0.5));
}

// |K*| = (KK*)^{1/2}.
inline PositiveDefiniteMatrix modulus_of_adjoint(const ComplexMatrix& k) {
  detail::require_invertible(k.mat(), "modulus");
  return PositiveDefiniteMatrix(detail::power_psd((k.mat() * k.mat().adjoint()).eval(), 0.5));
}

// Frobenius residual of |K*|^{2s} = K |K|^{2(s-1)} K* for invertible K.
inline double modulus_transfer_residual(const ComplexMatrix& k, double s) {
  detail::require_invertible(k.mat(), "modulus_transfer_residual");
  const Mat kk_left = k.mat() * k.mat().adjoint();
  const Mat kk_right = k.mat().adjoint() * k.mat();
  const Mat lhs = detail::power_spectrum_pd(detail::eig_hermitian(kk_left), s);
  const Mat rhs =
      k.mat() * detail::power_spectrum_pd(detail::eig_hermitian(kk_right), s - 1.0) *
      k.mat().adjoint();
  return (lhs - rhs).norm();
}

// Kronecker product; factor order A (x) B with A on the leftmost slot.
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Partial trace over the 1-based factor indices in `traced`. Factor 1 is the
// leftmost tensor slot, i.e. the most significant digit of the row index.
inline Mat partial_trace(const Mat& m, const std::vector<int>& dims,
                         const std::vector<int>& traced) {
  if (m.rows() != m.cols()) throw DimensionMismatch("partial_trace: matrix must be square");
  long long total = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionMismatch("partial_trace: factor dims must be >= 1");
    total *= d;
  }
  if (total != m.rows()) throw DimensionMismatch("partial_trace: factor dims do not multiply out");
  const int nf = static_cast<int>(dims.size());
  std::vector<bool> is_traced(nf, false);
  for (int t : traced) {
    if (t < 1 || t > nf) throw DimensionMismatch("partial_trace: traced factor out of range");
    if (is_traced[t - 1]) throw DimensionMismatch("partial_trace: duplicate traced factor");
    is_traced[t - 1] = true;
  }

  // Strides with factor 1 most significant.
  std::vector<long long> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

  std::vector<int> kept_f, traced_f;
  for (int f = 0; f < nf; ++f) (is_traced[f] ? traced_f : kept_f).push_back(f);
  long long kept_dim = 1, traced_dim = 1;
  for (int f : kept_f) kept_dim *= dims[f];
  for (int f : traced_f) traced_dim *= dims[f];

  auto embed = [&](long long packed, const std::vector<int>& factors) {
    long long idx = 0;
    for (int pos = static_cast<int>(factors.size()) - 1; pos >= 0; --pos) {
      const int f = factors[pos];
      idx += (packed % dims[f]) * stride[f];
      packed /= dims[f];
    }
    return idx;
  };

  Mat out = Mat::Zero(kept_dim, kept_dim);
  for (long long i = 0; i < kept_dim; ++i) {
    const long long ri = embed(i, kept_f);
    for (long long j = 0; j < kept_dim; ++j) {
      const long long rj = embed(j, kept_f);
      cplx acc = 0.0;
      for (long long t = 0; t < traced_dim; ++t) {
        const long long rt = embed(t, traced_f);
        acc += m(ri + rt, rj + rt);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace alphaz
