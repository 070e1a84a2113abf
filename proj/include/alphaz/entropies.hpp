#pragma once
// Renyi-type relative entropies built from the trace functional
// Tr(B^{q/2} A^p B^{q/2})^{1/(p+q)}, plus the test for the parameter
// region where the data processing inequality is known to hold.

#include <algorithm>
#include <cmath>

#include "alphaz/channels.hpp"
#include "alphaz/linalg.hpp"
#include "alphaz/tolerances.hpp"

namespace alphaz {

// Exponent pair (alpha, z) with the derived powers p = alpha/z and
// q = (1-alpha)/z used throughout.
struct ParamPoint {
  double alpha;
  double z;
  double p;
  double q;

  ParamPoint(double alpha_, double z_) : alpha(alpha_), z(z_) {
    if (!std::isfinite(alpha) || !std::isfinite(z))
      throw InvalidParams("ParamPoint: alpha and z must be finite");
    if (alpha == 1.0) throw InvalidParams("ParamPoint: alpha = 1 is excluded");
    if (z <= 0.0) throw InvalidParams("ParamPoint: z must be positive");
    p = alpha / z;
    q = (1.0 - alpha) / z;
  }
};

enum class RegionCase { none = 0, one = 1, two = 2, three = 3 };

struct RegionVerdict {
  bool valid;
  RegionCase case_id;
  bool boundary;
};

// Membership in the union of the three closed parameter strips where the
// data processing inequality holds. At alpha = 2 the second and third
// strips overlap; the lower case id wins. The boundary flag marks points
// within tol::region_boundary of an edge curve of the union, for valid
// and invalid points alike.
inline RegionVerdict region_check(const ParamPoint& pt) {
  const double a = pt.alpha;
  const double z = pt.z;

  RegionCase id = RegionCase::none;
  if (a > 0.0 && a < 1.0 && z >= std::max(a, 1.0 - a)) {
    id = RegionCase::one;
  } else if (a > 1.0 && a <= 2.0 && z >= a / 2.0 && z <= a) {
    id = RegionCase::two;
  } else if (a >= 2.0 && z >= a - 1.0 && z <= a) {
    id = RegionCase::three;
  }

  bool boundary = false;
  const double snap = tol::region_boundary;
  if (a > 0.0 && a < 1.0) boundary = std::abs(z - std::max(a, 1.0 - a)) <= snap;
  if (a > 1.0 && std::abs(z - a) <= snap) boundary = true;
  if (a > 1.0 && a <= 2.0 && std::abs(z - a / 2.0) <= snap) boundary = true;
  if (a >= 2.0 && std::abs(z - (a - 1.0)) <= snap) boundary = true;

  return RegionVerdict{id != RegionCase::none, id, boundary};
}

namespace detail {

inline void require_same_dim(const Mat& a, const Mat& b, const char* who) {
  if (a.rows() != b.rows())
    throw DimensionMismatch(std::string(who) + ": operands have different dimensions");
}

inline double psi_b_side(const ParamPoint& pt, const Mat& ap, const Mat& bq2) {
  const Mat core = bq2 * ap * bq2;
  return trace_power_psd(core, 1.0 / (pt.p + pt.q));
}

inline double psi_a_side(const ParamPoint& pt, const Mat& ap2, const Mat& bq) {
  const Mat core = ap2 * bq * ap2;
  return trace_power_psd(core, 1.0 / (pt.p + pt.q));
}

}  // namespace detail

// Tr(B^{q/2} A^p B^{q/2})^{1/(p+q)}. Both evaluation orders are computed
// every call; they are equal in exact arithmetic and their agreement is a
// cheap guard against a mis-prepared input pair.
inline double psi(const ParamPoint& pt, const PositiveDefiniteMatrix& a,
                  const PositiveDefiniteMatrix& b) {
  detail::require_same_dim(a.mat(), b.mat(), "psi");
  const double b_side = detail::psi_b_side(pt, mat_power(a, pt.p).mat(), mat_power(b, pt.q / 2.0).mat());
  const double a_side = detail::psi_a_side(pt, mat_power(a, pt.p / 2.0).mat(), mat_power(b, pt.q).mat());
  const double scale = std::max({1.0, std::abs(a_side), std::abs(b_side)});
  if (std::abs(a_side - b_side) > 1e-10 * scale)
    throw Error("psi: the two evaluation orders disagree beyond tolerance");
  return b_side;
}

// (1/(alpha-1)) ln Tr(sigma^{(1-alpha)/2z} rho^{alpha/z} sigma^{(1-alpha)/2z})^z,
// natural logarithm.
inline double d_alpha_z(const ParamPoint& pt, const QuantumState& rho, const QuantumState& sigma) {
  detail::require_same_dim(rho.mat(), sigma.mat(), "d_alpha_z");
  const double value = psi(pt, PositiveDefiniteMatrix(rho.mat()), PositiveDefiniteMatrix(sigma.mat()));
  return std::log(value) / (pt.alpha - 1.0);
}

inline double d_petz(double alpha, const QuantumState& rho, const QuantumState& sigma) {
  return d_alpha_z(ParamPoint(alpha, 1.0), rho, sigma);
}

inline double d_sandwiched(double alpha, const QuantumState& rho, const QuantumState& sigma) {
  return d_alpha_z(ParamPoint(alpha, alpha), rho, sigma);
}

// Tr[rho (ln rho - ln sigma)].
inline double d_umegaki(const QuantumState& rho, const QuantumState& sigma) {
  detail::require_same_dim(rho.mat(), sigma.mat(), "d_umegaki");
  const Mat diff = detail::log_pd(rho.mat()) - detail::log_pd(sigma.mat());
  return (rho.mat() * diff).trace().real();
}

// (1/(alpha-1)) ln sum_i p_i^alpha q_i^{1-alpha} for strictly positive
// probability vectors; the commuting-case oracle for the quantum entropies.
inline double classical_renyi(double alpha, const RVec& p_vec, const RVec& q_vec) {
  if (alpha == 1.0) throw InvalidParams("classical_renyi: alpha = 1 is excluded");
  if (p_vec.size() != q_vec.size() || p_vec.size() == 0)
    throw InvalidParams("classical_renyi: vectors must be non-empty and of equal length");
  double p_sum = 0.0, q_sum = 0.0, acc = 0.0;
  for (Eigen::Index i = 0; i < p_vec.size(); ++i) {
    if (!(p_vec(i) > 0.0) || !(q_vec(i) > 0.0))
      throw InvalidParams("classical_renyi: entries must be strictly positive");
    p_sum += p_vec(i);
    q_sum += q_vec(i);
    acc += std::pow(p_vec(i), alpha) * std::pow(q_vec(i), 1.0 - alpha);
  }
  if (std::abs(p_sum - 1.0) > 1e-10 || std::abs(q_sum - 1.0) > 1e-10)
    throw InvalidParams("classical_renyi: vectors must sum to 1");
  return std::log(acc) / (alpha - 1.0);
}

}  // namespace alphaz
