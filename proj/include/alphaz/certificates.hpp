#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "alphaz/channels.hpp"
#include "alphaz/entropies.hpp"

namespace alphaz {

namespace detail {

inline double rel_residual(const Mat& lhs, const Mat& rhs) {
  return (lhs - rhs).norm() / std::max({1.0, lhs.norm(), rhs.norm()});
}

// Channel image wrapped as a state; singular images are rejected because every
// certificate quantity divides by them.
inline QuantumState image_state(const QuantumChannel& e, const QuantumState& w, const char* who) {
  try {
    return QuantumState(e.apply(w.mat()));
  } catch (const NotPositiveDefinite& err) {
    throw ImageNotFaithful(std::string(who) + ": channel image is singular (" + err.what() + ")");
  }
}

}  // namespace detail

// Optimizer block on the input side: the positive definite x with
// x = sigma^{q/2} (sigma^{q/2} rho^p sigma^{q/2})^{-q/(p+q)} sigma^{q/2}
//   = rho^{-p/2} (rho^{p/2} sigma^q rho^{p/2})^{p/(p+q)} rho^{-p/2}.
// Both expressions are evaluated on every call; the sigma-side form is the
// return value and the rho-side form must agree with it to 1e-9 relative.
inline PositiveDefiniteMatrix compute_x(const ParamPoint& pt, const QuantumState& rho,
                                        const QuantumState& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("compute_x: state dimension mismatch");
  const PositiveDefiniteMatrix r(rho.mat());
  const PositiveDefiniteMatrix s(sigma.mat());
  const double p = pt.p, q = pt.q;

  const Mat sq = mat_power(s, q / 2.0).mat();
  const Mat sigma_core = sq * mat_power(r, p).mat() * sq;
  const Mat x_sigma =
      sq * mat_power(PositiveDefiniteMatrix(sigma_core), -q / (p + q)).mat() * sq;

  const Mat rh = mat_power(r, p / 2.0).mat();
  const Mat rh_inv = mat_power(r, -p / 2.0).mat();
  const Mat rho_core = rh * mat_power(s, q).mat() * rh;
  const Mat x_rho =
      rh_inv * mat_power(PositiveDefiniteMatrix(rho_core), p / (p + q)).mat() * rh_inv;

  const double gap = detail::rel_residual(x_sigma, x_rho);
  if (gap > 1e-9)
    throw Error("compute_x: optimizer forms disagree, relative gap " + std::to_string(gap));
  return PositiveDefiniteMatrix(x_sigma);
}

// Optimizer block on the output side, computed from the channel images.
inline PositiveDefiniteMatrix compute_y(const ParamPoint& pt, const QuantumState& rho,
                                        const QuantumState& sigma, const QuantumChannel& e) {
  if (rho.dim() != e.dim_in() || sigma.dim() != e.dim_in())
    throw DimensionMismatch("compute_y: state and channel dimensions do not match");
  const QuantumState er = detail::image_state(e, rho, "compute_y");
  const QuantumState es = detail::image_state(e, sigma, "compute_y");
  return compute_x(pt, er, es);
}

// Residual of the identity connecting the optimizer block to the divergence
// core, (rho^{p/2} x rho^{p/2})^{1/p} = (rho^{p/2} sigma^q rho^{p/2})^{1/(p+q)}.
inline double optimizer_core_residual(const ParamPoint& pt, const QuantumState& rho,
                                      const QuantumState& sigma) {
  const PositiveDefiniteMatrix x = compute_x(pt, rho, sigma);
  const PositiveDefiniteMatrix r(rho.mat());
  const PositiveDefiniteMatrix s(sigma.mat());
  const Mat rh = mat_power(r, pt.p / 2.0).mat();
  const Mat lhs =
      mat_power(PositiveDefiniteMatrix(rh * x.mat() * rh), 1.0 / pt.p).mat();
  const Mat rhs = mat_power(PositiveDefiniteMatrix(rh * mat_power(s, pt.q).mat() * rh),
                            1.0 / (pt.p + pt.q))
                      .mat();
  return detail::rel_residual(lhs, rhs);
}

// A candidate equality instance: two faithful states, a channel between
// compatible spaces, and a parameter point inside the monotonicity region.
struct EqualityTriple {
  QuantumState rho;
  QuantumState sigma;
  QuantumChannel channel;
  ParamPoint pt;

  EqualityTriple(QuantumState rho_, QuantumState sigma_, QuantumChannel channel_, ParamPoint pt_)
      : rho(std::move(rho_)), sigma(std::move(sigma_)), channel(std::move(channel_)), pt(pt_) {
    if (rho.dim() != channel.dim_in() || sigma.dim() != channel.dim_in())
      throw DimensionMismatch("EqualityTriple: state and channel dimensions do not match");
    if (!region_check(pt).valid)
      throw InvalidParams("EqualityTriple: (alpha, z) outside the monotonicity region");
  }
};

// Residuals and verdicts for the divergence gap and the three algebraic
// equality conditions. Residuals are relative Frobenius; a verdict is true
// exactly when its residual passes the pinned tolerance.
struct CertificateReport {
  double d_input = 0.0;   // divergence of (rho, sigma)
  double d_output = 0.0;  // divergence of the channel images
  double dpi_gap = 0.0;   // d_input - d_output, nonnegative inside the region

  double res_x_adjoint = 0.0;      // x against the adjoint-pulled y
  double res_rho_transfer = 0.0;   // channel transfer of the rho-side block
  double res_sigma_transfer = 0.0; // channel transfer of the sigma-side block

  bool dpi_equal = false;
  bool x_adjoint_ok = false;
  bool rho_transfer_ok = false;
  bool sigma_transfer_ok = false;

  // Whether equality of the divergences forces the respective transfer
  // condition: the rho side requires p != 1, the sigma side q != +-1.
  bool rho_transfer_necessary = false;
  bool sigma_transfer_necessary = false;
};

// Evaluates the divergence gap and the three equality conditions, then checks
// every implication between the verdicts that holds unconditionally: either
// transfer condition forces a closed gap, a closed gap forces the adjoint
// identity, and a closed gap forces each transfer condition whenever the
// exponents make it necessary. A failed implication is raised, never returned.
inline CertificateReport check_conditions(const EqualityTriple& t) {
  const ParamPoint& pt = t.pt;
  const double p = pt.p, q = pt.q;

  const PositiveDefiniteMatrix x = compute_x(pt, t.rho, t.sigma);
  const QuantumState er = detail::image_state(t.channel, t.rho, "check_conditions");
  const QuantumState es = detail::image_state(t.channel, t.sigma, "check_conditions");
  const PositiveDefiniteMatrix y = compute_x(pt, er, es);

  CertificateReport rep;
  rep.d_input = d_alpha_z(pt, t.rho, t.sigma);
  rep.d_output = d_alpha_z(pt, er, es);
  rep.dpi_gap = rep.d_input - rep.d_output;

  rep.res_x_adjoint = detail::rel_residual(x.mat(), t.channel.apply_adjoint(y.mat()));

  const PositiveDefiniteMatrix rho_pd(t.rho.mat());
  const PositiveDefiniteMatrix sigma_pd(t.sigma.mat());
  const PositiveDefiniteMatrix er_pd(er.mat());
  const PositiveDefiniteMatrix es_pd(es.mat());

  const Mat xh = mat_power(x, 0.5).mat();
  const Mat yh = mat_power(y, 0.5).mat();
  const Mat rho_block =
      mat_power(PositiveDefiniteMatrix(xh * mat_power(rho_pd, p).mat() * xh), 1.0 / p).mat();
  const Mat rho_image =
      mat_power(PositiveDefiniteMatrix(yh * mat_power(er_pd, p).mat() * yh), 1.0 / p).mat();
  rep.res_rho_transfer = detail::rel_residual(t.channel.apply(rho_block), rho_image);

  const Mat xhi = mat_power(x, -0.5).mat();
  const Mat yhi = mat_power(y, -0.5).mat();
  const Mat sigma_block =
      mat_power(PositiveDefiniteMatrix(xhi * mat_power(sigma_pd, q).mat() * xhi), 1.0 / q).mat();
  const Mat sigma_image =
      mat_power(PositiveDefiniteMatrix(yhi * mat_power(es_pd, q).mat() * yhi), 1.0 / q).mat();
  rep.res_sigma_transfer = detail::rel_residual(t.channel.apply(sigma_block), sigma_image);

  rep.dpi_equal = std::abs(rep.dpi_gap) <= tol::dpi_equal * (1.0 + std::abs(rep.d_input));
  rep.x_adjoint_ok = rep.res_x_adjoint <= tol::cert;
  rep.rho_transfer_ok = rep.res_rho_transfer <= tol::cert;
  rep.sigma_transfer_ok = rep.res_sigma_transfer <= tol::cert;
  rep.rho_transfer_necessary = std::abs(p - 1.0) > 1e-12;
  rep.sigma_transfer_necessary = std::min(std::abs(q - 1.0), std::abs(q + 1.0)) > 1e-12;

  if (rep.dpi_gap < -1e-9)
    throw TheoremViolation("check_conditions: divergence increased under the channel, gap " +
                           std::to_string(rep.dpi_gap));
  if ((rep.rho_transfer_ok || rep.sigma_transfer_ok) && !rep.dpi_equal)
    throw TheoremViolation(
        "check_conditions: a transfer condition holds but the divergence gap " +
        std::to_string(rep.dpi_gap) + " is not closed");
  if (rep.dpi_equal && !rep.x_adjoint_ok)
    throw TheoremViolation("check_conditions: gap closed but adjoint residual " +
                           std::to_string(rep.res_x_adjoint) + " fails");
  if (rep.dpi_equal && rep.rho_transfer_necessary && !rep.rho_transfer_ok)
    throw TheoremViolation("check_conditions: gap closed but rho transfer residual " +
                           std::to_string(rep.res_rho_transfer) + " fails");
  if (rep.dpi_equal && rep.sigma_transfer_necessary && !rep.sigma_transfer_ok)
    throw TheoremViolation("check_conditions: gap closed but sigma transfer residual " +
                           std::to_string(rep.res_sigma_transfer) + " fails");
  return rep;
}

// Recovery channel for the parameter point alpha = z = 2: Kraus operators
// sigma^{1/2} E_k^* E(sigma)^{-1/2}. Construction validates the Kraus closure
// and Choi positivity, and the map must send E(sigma) back to sigma.
inline QuantumChannel recovery_2_2(const QuantumState& sigma, const QuantumChannel& e) {
  if (sigma.dim() != e.dim_in())
    throw DimensionMismatch("recovery_2_2: state and channel dimensions do not match");
  const QuantumState es = detail::image_state(e, sigma, "recovery_2_2");
  const Mat s_half = mat_power(PositiveDefiniteMatrix(sigma.mat()), 0.5).mat();
  const Mat es_ihalf = mat_power(PositiveDefiniteMatrix(es.mat()), -0.5).mat();

  std::vector<Mat> kraus;
  kraus.reserve(e.kraus().size());
  for (const Mat& ek : e.kraus()) kraus.push_back(s_half * ek.adjoint() * es_ihalf);
  QuantumChannel r(std::move(kraus), "recovery");

  const double defect = (r.apply(es.mat()) - sigma.mat()).norm();
  if (defect > 1e-10)
    throw Error("recovery_2_2: reference state not reproduced, defect " + std::to_string(defect));
  return r;
}

// Recovery action at a general parameter point, solved in closed form from its
// defining equation: with M the adjoint pullback of the image-side block of
// omega, the result is [sigma^{-q/2} (sigma^{-q/2} M sigma^{-q/2})^{-(p+q)/q}
// sigma^{-q/2}]^{1/p}. The result is back-substituted into the equation before
// it is returned. The map fixes E(sigma) by unitality of the adjoint; it is
// not claimed to be a channel away from alpha = z = 2, so the caller receives
// a positive matrix, not a state.
inline PositiveDefiniteMatrix recovery_general(const ParamPoint& pt, const QuantumState& sigma,
                                               const QuantumChannel& e,
                                               const PositiveDefiniteMatrix& omega) {
  if (sigma.dim() != e.dim_in())
    throw DimensionMismatch("recovery_general: state and channel dimensions do not match");
  if (omega.dim() != e.dim_out())
    throw DimensionMismatch("recovery_general: argument must live on the channel output");
  const QuantumState es = detail::image_state(e, sigma, "recovery_general");
  const double p = pt.p, q = pt.q;

  auto pd_step = [](const Mat& m, const char* step) {
    try {
      return PositiveDefiniteMatrix(m);
    } catch (const NotPositiveDefinite& err) {
      throw NotPositiveDefinite(std::string("recovery_general: ") + step + ": " + err.what());
    }
  };

  const PositiveDefiniteMatrix es_pd(es.mat());
  const Mat esq = mat_power(es_pd, q / 2.0).mat();
  const PositiveDefiniteMatrix image_core =
      pd_step(esq * mat_power(omega, p).mat() * esq, "image-side core");
  const Mat lifted = esq * mat_power(image_core, -q / (p + q)).mat() * esq;
  const PositiveDefiniteMatrix m = pd_step(e.apply_adjoint(lifted), "adjoint pullback");

  const PositiveDefiniteMatrix sigma_pd(sigma.mat());
  const Mat sqi = mat_power(sigma_pd, -q / 2.0).mat();
  const PositiveDefiniteMatrix source_core = pd_step(sqi * m.mat() * sqi, "source-side core");
  const Mat unpowered = sqi * mat_power(source_core, -(p + q) / q).mat() * sqi;
  const PositiveDefiniteMatrix result = mat_power(pd_step(unpowered, "recovered power"), 1.0 / p);

  const Mat sq = mat_power(sigma_pd, q / 2.0).mat();
  const PositiveDefiniteMatrix back_core =
      pd_step(sq * mat_power(result, p).mat() * sq, "back-substitution core");
  const Mat back = sq * mat_power(back_core, -q / (p + q)).mat() * sq;
  const double rel = detail::rel_residual(back, m.mat());
  if (rel > 1e-8)
    throw Error("recovery_general: back-substitution misses the defining equation by " +
                std::to_string(rel));
  return result;
}

// Lifted operators over the dilation space: the reference pair (h0 and the
// blockwise k0, l0) built from y and the channel images, and the twirled
// family (h_j, k_j, l_j) built from x and the conjugated state lifts. In an
// equality instance h0 equals every h_j, k0 equals the mean of the k_j when
// p != 1, and l0 equals the mean of the l_j when q != +-1.
struct ProofArtifacts {
  int d = 0;  // dimension of the twirled factor
  Mat h0;
  Mat k0;
  Mat l0;
  std::vector<Mat> h;
  std::vector<Mat> k;
  std::vector<Mat> l;

  double res_h = 0.0;       // worst relative gap between h0 and an h_j
  double res_k_mean = 0.0;  // relative gap between k0 and the mean of k_j
  double res_l_mean = 0.0;  // relative gap between l0 and the mean of l_j
  bool k_mean_necessary = false;
  bool l_mean_necessary = false;
};

inline ProofArtifacts proof_artifacts(const EqualityTriple& t,
                                      std::uint64_t seed = 0xA1FA5EEDULL) {
  const StinespringDilation probe = stinespring_dilate(t.channel, seed);
  const int d = static_cast<int>(probe.dim_in * probe.env_dim);
  if (d > 12)
    throw InvalidParams("proof_artifacts: twirled factor dimension " + std::to_string(d) +
                        " exceeds 12; the twirl allocates d^2 operators of size (d*dim_out)^2");

  const TwirledDecomposition td = twirled_decomposition(t.channel, t.rho, t.sigma, seed);
  const Eigen::Index nout = td.dilation.dim_out;
  const double p = t.pt.p, q = t.pt.q;

  const PositiveDefiniteMatrix x = compute_x(t.pt, t.rho, t.sigma);
  const QuantumState er = detail::image_state(t.channel, t.rho, "proof_artifacts");
  const QuantumState es = detail::image_state(t.channel, t.sigma, "proof_artifacts");
  const PositiveDefiniteMatrix y = compute_x(t.pt, er, es);

  ProofArtifacts out;
  out.d = d;
  const Mat id_d = Mat::Identity(d, d);
  out.h0 = kron(id_d, y.mat());
  const Mat h0_half = kron(id_d, mat_power(y, 0.5).mat());
  const Mat h0_ihalf = kron(id_d, mat_power(y, -0.5).mat());

  const Mat yh = mat_power(y, 0.5).mat();
  const Mat yhi = mat_power(y, -0.5).mat();
  const PositiveDefiniteMatrix er_pd(er.mat());
  const PositiveDefiniteMatrix es_pd(es.mat());
  const Mat k_block =
      mat_power(PositiveDefiniteMatrix(yh * mat_power(er_pd, p).mat() * yh), 1.0 / p).mat();
  const Mat l_block =
      mat_power(PositiveDefiniteMatrix(yhi * mat_power(es_pd, q).mat() * yhi), 1.0 / q).mat();
  out.k0 = kron(id_d / static_cast<double>(d), k_block);
  out.l0 = kron(id_d / static_cast<double>(d), l_block);

  const Eigen::Index env = td.dilation.env_dim;
  const Mat x_lift = td.dilation.unitary *
                     kron(x.mat(), Mat::Identity(env * nout, env * nout)) *
                     td.dilation.unitary.adjoint();
  const std::vector<Mat> hw = heisenberg_weyl(d);
  const Mat id_out = Mat::Identity(nout, nout);

  out.h.reserve(hw.size());
  out.k.reserve(hw.size());
  out.l.reserve(hw.size());
  Mat k_sum = Mat::Zero(d * nout, d * nout);
  Mat l_sum = Mat::Zero(d * nout, d * nout);
  double worst_h = 0.0;
  for (std::size_t j = 0; j < hw.size(); ++j) {
    const Mat uj = kron(hw[j], id_out);
    out.h.push_back(uj * x_lift * uj.adjoint());
    worst_h = std::max(worst_h, detail::rel_residual(out.h0, out.h.back()));

    // State lifts are singular by construction (the environment is pure), so
    // every power below follows the support convention.
    const Mat kj = pseudo_power(h0_half * pseudo_power(td.v[j], p) * h0_half, 1.0 / p);
    const Mat lj = pseudo_power(h0_ihalf * pseudo_power(td.w[j], q) * h0_ihalf, 1.0 / q);
    k_sum += kj;
    l_sum += lj;
    out.k.push_back(kj);
    out.l.push_back(lj);
  }

  const double count = static_cast<double>(hw.size());
  out.res_h = worst_h;
  out.res_k_mean = detail::rel_residual(out.k0, k_sum / count);
  out.res_l_mean = detail::rel_residual(out.l0, l_sum / count);
  out.k_mean_necessary = std::abs(p - 1.0) > 1e-12;
  out.l_mean_necessary = std::min(std::abs(q - 1.0), std::abs(q + 1.0)) > 1e-12;
  return out;
}

}  // namespace alphaz
