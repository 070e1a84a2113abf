#pragma once
// Variational formulas for trace powers of matrix products with unique
// closed-form optimizers, their gradients and a positive-cone optimizer,
// the two-exponent matrix-pair equation solver, and randomized joint
// concavity/convexity probes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "alphaz/linalg.hpp"
#include "alphaz/rng.hpp"
#include "alphaz/tolerances.hpp"

namespace alphaz {

// Exponents r0, r1, r2 > 0 tied by the Holder-type relation 1/r0 = 1/r1 + 1/r2.
struct TripleExponents {
  double r0;
  double r1;
  double r2;

  TripleExponents(double r0_, double r1_, double r2_) : r0(r0_), r1(r1_), r2(r2_) {
    if (!(r0 > 0.0) || !(r1 > 0.0) || !(r2 > 0.0))
      throw InvalidParams("TripleExponents: all exponents must be positive");
    const double defect = std::abs(1.0 / r0 - 1.0 / r1 - 1.0 / r2);
    if (defect > 1e-12 * std::max(1.0, 1.0 / r0))
      throw InvalidParams("TripleExponents: 1/r0 = 1/r1 + 1/r2 violated by " +
                          std::to_string(defect));
  }
};

enum class Sense { minimize, maximize };

// Objective over the positive-definite cone whose optimum is a trace power
// of |XY|: the exponent 2*r0 at the minimum, 2*r1 at the maximum.
struct VariationalProblem {
  TripleExponents exps;
  Mat x;
  Mat y;
  Sense sense;

  VariationalProblem(const TripleExponents& e, const ComplexMatrix& x_, const ComplexMatrix& y_,
                     Sense sense_)
      : exps(e), x(x_.mat()), y(y_.mat()), sense(sense_) {
    if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
      throw DimensionMismatch("VariationalProblem: X and Y must be square and of equal size");
    detail::require_invertible(x, "VariationalProblem: X");
    detail::require_invertible(y, "VariationalProblem: Y");
  }
};

struct Optimum {
  PositiveDefiniteMatrix h;
  double value;
};

namespace detail {

inline Mat pd_pow(const Mat& m, double s) {
  return mat_power(PositiveDefiniteMatrix(m), s).mat();
}

// Power of a matrix assumed to lie in the open cone. Unlike pd_pow there is
// no conditioning floor: optimizer iterates may drift arbitrarily close to
// the boundary, where powers stay computable (clamped for s >= 0, strictly
// positive spectrum required only when inversion is involved).
inline Mat cone_pow(const Mat& m, double s) {
  if (s >= 0.0) return power_psd(m, s);
  const EigSystem e = eig_hermitian(0.5 * (m + m.adjoint()));
  RVec mapped(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) <= 0.0)
      throw NotPositiveDefinite("cone power: nonpositive eigenvalue under a negative exponent");
    mapped(i) = std::pow(e.values(i), s);
  }
  return from_eig(e, mapped);
}

}  // namespace detail

// Tr|XY|^{2r} with r chosen by the sense: the value the optimization attains.
inline double direct_trace_power(const VariationalProblem& vp) {
  const Mat xy = vp.x * vp.y;
  const double r = vp.sense == Sense::minimize ? vp.exps.r0 : vp.exps.r1;
  return detail::trace_power_psd(xy.adjoint() * xy, r);
}

// Objective value at H. Minimizing sense:
//   (r0/r1) Tr(X H X*)^{r1} + (r0/r2) Tr(Y* H^{-1} Y)^{r2};
// maximizing sense:
//   (r1/r0) Tr(X H X*)^{r0} - (r1/r2) Tr(Y^{-1} H (Y^{-1})*)^{r2}.
inline double eval_f(const VariationalProblem& vp, const PositiveDefiniteMatrix& h) {
  if (h.dim() != vp.x.rows()) throw DimensionMismatch("eval_f: H has the wrong dimension");
  const TripleExponents& r = vp.exps;
  const Mat xhx = vp.x * h.mat() * vp.x.adjoint();
  if (vp.sense == Sense::minimize) {
    const Mat hinv = mat_power(h, -1.0).mat();
    const Mat yhy = vp.y.adjoint() * hinv * vp.y;
    return (r.r0 / r.r1) * detail::trace_power_psd(xhx, r.r1) +
           (r.r0 / r.r2) * detail::trace_power_psd(yhy, r.r2);
  }
  const Mat yinv = vp.y.inverse();
  const Mat yhy = yinv * h.mat() * yinv.adjoint();
  return (r.r1 / r.r0) * detail::trace_power_psd(xhx, r.r0) -
         (r.r1 / r.r2) * detail::trace_power_psd(yhy, r.r2);
}

// Gradient of the objective with respect to H. Minimizing sense:
//   r0 [X*(XHX*)^{r1-1}X - (Y^{-1})*(Y^{-1}H(Y^{-1})*)^{-r2-1}Y^{-1}];
// maximizing sense:
//   r1 [X*(XHX*)^{r0-1}X - (Y^{-1})*(Y^{-1}H(Y^{-1})*)^{r2-1}Y^{-1}].
inline Mat grad_phi(const VariationalProblem& vp, const PositiveDefiniteMatrix& h) {
  if (h.dim() != vp.x.rows()) throw DimensionMismatch("grad_phi: H has the wrong dimension");
  const TripleExponents& r = vp.exps;
  const Mat xhx = vp.x * h.mat() * vp.x.adjoint();
  const Mat yinv = vp.y.inverse();
  const Mat yhy = yinv * h.mat() * yinv.adjoint();
  Mat g;
  if (vp.sense == Sense::minimize) {
    g = r.r0 * (vp.x.adjoint() * detail::cone_pow(xhx, r.r1 - 1.0) * vp.x -
                yinv.adjoint() * detail::cone_pow(yhy, -r.r2 - 1.0) * yinv);
  } else {
    g = r.r1 * (vp.x.adjoint() * detail::cone_pow(xhx, r.r0 - 1.0) * vp.x -
                yinv.adjoint() * detail::cone_pow(yhy, r.r2 - 1.0) * yinv);
  }
  return 0.5 * (g + g.adjoint());
}

// Central finite-difference directional derivative of the objective at H
// along a Hermitian direction; the independent oracle for grad_phi.
inline double fd_directional_derivative(const VariationalProblem& vp,
                                        const PositiveDefiniteMatrix& h, const Mat& direction) {
  const double step = tol::fd_step * (1.0 + h.mat().norm());
  const Mat dir = 0.5 * (direction + direction.adjoint());
  const double f_plus = eval_f(vp, PositiveDefiniteMatrix(h.mat() + step * dir));
  const double f_minus = eval_f(vp, PositiveDefiniteMatrix(h.mat() - step * dir));
  return (f_plus - f_minus) / (2.0 * step);
}

namespace detail {

inline void check_close(double got, double want, double rel, const char* what) {
  if (std::abs(got - want) > rel * std::max(1.0, std::abs(want)))
    throw Error(std::string(what) + ": expected " + std::to_string(want) + ", got " +
                std::to_string(got));
}

inline Optimum closed_form(const VariationalProblem& vp) {
  const TripleExponents& r = vp.exps;
  const Mat xy = vp.x * vp.y;
  const Mat xy_gram = xy.adjoint() * xy;        // |XY|^2
  const Mat xy_cogram = xy * xy.adjoint();      // |Y*X*|^2
  const Mat xinv = vp.x.inverse();

  const bool minimize = vp.sense == Sense::minimize;
  const double s_first = minimize ? r.r0 / r.r1 : r.r1 / r.r0;
  const double s_second = minimize ? -r.r0 / r.r2 : r.r1 / r.r2;

  const Mat form_x = xinv * pd_pow(xy_cogram, s_first) * xinv.adjoint();
  const Mat form_y = vp.y * pd_pow(xy_gram, s_second) * vp.y.adjoint();
  const double scale = std::max(1.0, form_x.norm());
  if ((form_x - form_y).norm() > 1e-9 * scale)
    throw Error("closed-form optimizer: the X-side and Y-side expressions disagree");

  const PositiveDefiniteMatrix h(0.5 * (form_x + form_y));
  const double direct = direct_trace_power(vp);
  const double value = eval_f(vp, h);
  check_close(value, direct, 1e-9, "closed-form optimizer: objective vs direct trace power");

  // Balance identities: both traces in the objective equal the direct value.
  const Mat xhx = vp.x * h.mat() * vp.x.adjoint();
  if (minimize) {
    const Mat yhy = vp.y.adjoint() * mat_power(h, -1.0).mat() * vp.y;
    check_close(trace_power_psd(xhx, r.r1), direct, 1e-9, "balance identity, X term");
    check_close(trace_power_psd(yhy, r.r2), direct, 1e-9, "balance identity, Y term");
  } else {
    const Mat yinv = vp.y.inverse();
    const Mat yhy = yinv * h.mat() * yinv.adjoint();
    check_close(trace_power_psd(xhx, r.r0), direct, 1e-9, "balance identity, X term");
    check_close(trace_power_psd(yhy, r.r2), direct, 1e-9, "balance identity, Y term");
  }
  return Optimum{h, value};
}

}  // namespace detail

// Unique minimizer H = X^{-1}|Y*X*|^{2r0/r1}(X^{-1})* = Y|XY|^{-2r0/r2}Y*;
// both expressions are computed and cross-checked, the returned value is the
// objective there and equals Tr|XY|^{2r0}.
inline Optimum closed_form_min(const VariationalProblem& vp) {
  if (vp.sense != Sense::minimize)
    throw InvalidParams("closed_form_min: problem sense is not minimize");
  return detail::closed_form(vp);
}

// Unique maximizer H = X^{-1}|Y*X*|^{2r1/r0}(X^{-1})* = Y|XY|^{2r1/r2}Y*;
// value equals Tr|XY|^{2r1}.
inline Optimum closed_form_max(const VariationalProblem& vp) {
  if (vp.sense != Sense::maximize)
    throw InvalidParams("closed_form_max: problem sense is not maximize");
  return detail::closed_form(vp);
}

struct OptimizeOptions {
  int max_iterations = tol::optimize_iter_cap;
  double gradient_tolerance = tol::grad;
  double initial_step = tol::optimize_step0;
  double backtrack_factor = tol::optimize_backtrack;
};

struct OptimizeResult {
  PositiveDefiniteMatrix h;
  double value;
  int iterations;
};

// Gradient descent (ascent for the maximizing sense) over the positive cone
// with a backtracking line search that keeps iterates positive definite.
inline OptimizeResult optimize_pd(const VariationalProblem& vp,
                                  const PositiveDefiniteMatrix& h_init,
                                  const OptimizeOptions& opts = {}) {
  PositiveDefiniteMatrix h = h_init;
  double f = eval_f(vp, h);
  Mat g = grad_phi(vp, h);
  const double descent_sign = vp.sense == Sense::minimize ? 1.0 : -1.0;

  for (int it = 0; it <= opts.max_iterations; ++it) {
    const double g_norm = g.norm();
    const double scale = std::max(1.0, std::abs(f));
    if (g_norm <= opts.gradient_tolerance * scale) return OptimizeResult{h, f, it};

    double eta = opts.initial_step;
    bool moved = false;
    while (eta > 1e-18) {
      Mat trial = h.mat() - descent_sign * eta * g;
      trial = 0.5 * (trial + trial.adjoint());
      // Objectives without a boundary barrier can pull the raw step outside
      // the cone faster than backtracking shrinks it, wedging the search at
      // the boundary. Projecting the spectrum onto the feasibility floor
      // keeps such steps usable; acceptance still requires improvement.
      {
        const EigSystem te = detail::eig_hermitian(trial);
        const double floor_base =
            tol::pd_floor * std::max(1.0, te.values(te.values.size() - 1));
        if (te.values(0) <= floor_base)
          trial = detail::from_eig(te, te.values.cwiseMax(10.0 * floor_base));
      }
      try {
        const PositiveDefiniteMatrix trial_pd(trial);
        const double f_trial = eval_f(vp, trial_pd);
        if (descent_sign * (f_trial - f) < 0.0) {
          // Gradient availability is part of step acceptance: iterates near
          // the cone boundary can evaluate cleanly yet have no usable
          // gradient, and such steps are rejected like infeasible ones.
          Mat g_trial = grad_phi(vp, trial_pd);
          h = trial_pd;
          f = f_trial;
          g = std::move(g_trial);
          moved = true;
          break;
        }
      } catch (const NotPositiveDefinite&) {
      }
      eta *= opts.backtrack_factor;
    }
    if (!moved) {
      // Objective improvements below double-precision resolution stall the
      // line search before the gradient rule fires; accept the iterate if it
      // is stationary to the documented stall floor.
      if (g_norm <= tol::grad_stall * scale) return OptimizeResult{h, f, it};
      throw NonConvergence("optimize_pd: no improving step found; gradient norm " +
                           std::to_string(g_norm) + ", objective " + std::to_string(f));
    }
  }
  // Objectives with a linear term have degenerate curvature and a slowly
  // decaying gradient tail; when the cap lands inside that tail the iterate
  // is judged by the same stall floor as an exhausted line search.
  if (g.norm() <= tol::grad_stall * std::max(1.0, std::abs(f)))
    return OptimizeResult{h, f, opts.max_iterations};
  throw NonConvergence("optimize_pd: iteration cap reached; gradient norm " +
                       std::to_string(g.norm()) + ", objective " + std::to_string(f));
}

// Two-equation system A^{a_i} = K B^{b_i} K*, i = 1, 2, for unknown positive
// definite (A, B); solvable uniquely when a1 b2 != a2 b1.
struct PairEquation {
  Mat k;
  double a1, a2, b1, b2;

  PairEquation(const ComplexMatrix& k_, double a1_, double a2_, double b1_, double b2_)
      : k(k_.mat()), a1(a1_), a2(a2_), b1(b1_), b2(b2_) {
    if (k.rows() != k.cols()) throw DimensionMismatch("PairEquation: K must be square");
    detail::require_invertible(k, "PairEquation: K");
    const double det = std::abs(a1 * b2 - a2 * b1);
    if (det <= tol::degenerate_coeff * std::max({std::abs(a1 * b2), std::abs(a2 * b1), 1.0}))
      throw DegenerateCoefficients("PairEquation: a1*b2 and a2*b1 are too close");
  }
};

struct PairSolution {
  PositiveDefiniteMatrix a;
  PositiveDefiniteMatrix b;
  double residual_first;
  double residual_second;
};

// A = |K*|^{2(b1-b2)/(a2 b1 - a1 b2)}, B = |K|^{2(a1-a2)/(a2 b1 - a1 b2)};
// both substitution residuals are verified against the system.
inline PairSolution solve_pair_equation(const PairEquation& pe) {
  const double den = pe.a2 * pe.b1 - pe.a1 * pe.b2;
  const Mat kk_adj = pe.k * pe.k.adjoint();   // |K*|^2
  const Mat kk = pe.k.adjoint() * pe.k;       // |K|^2
  const PositiveDefiniteMatrix a(detail::pd_pow(kk_adj, (pe.b1 - pe.b2) / den));
  const PositiveDefiniteMatrix b(detail::pd_pow(kk, (pe.a1 - pe.a2) / den));

  auto residual = [&](double ai, double bi) {
    const Mat lhs = mat_power(a, ai).mat();
    const Mat rhs = pe.k * mat_power(b, bi).mat() * pe.k.adjoint();
    return std::make_pair((lhs - rhs).norm(), std::max(1.0, lhs.norm()));
  };
  const auto [r1, s1] = residual(pe.a1, pe.b1);
  const auto [r2, s2] = residual(pe.a2, pe.b2);
  if (r1 > 1e-9 * s1 || r2 > 1e-9 * s2)
    throw Error("solve_pair_equation: substitution residual exceeds tolerance");
  return PairSolution{a, b, r1, r2};
}

// One-matrix linearization of Tr(K* A^e K)^{1/e}:
//   (1/e) Tr(K* A^e K Z^{1-e}) - ((1-e)/e) Tr Z,
// maximized over Z for 0 < e < 1 and minimized for e > 1, in both cases by
// Z = (K* A^e K)^{1/e}.
inline double linearized_trace_objective(const PositiveDefiniteMatrix& a, const ComplexMatrix& k,
                                         double e, const PositiveDefiniteMatrix& z) {
  if (e == 0.0) throw InvalidParams("linearized_trace_objective: exponent must be nonzero");
  const Mat m = k.mat().adjoint() * mat_power(a, e).mat() * k.mat();
  const Mat z_pow = mat_power(z, 1.0 - e).mat();
  return (1.0 / e) * (m * z_pow).trace().real() - ((1.0 - e) / e) * z.mat().trace().real();
}

struct LinearizedTraceOptimum {
  PositiveDefiniteMatrix z;
  double value;
};

namespace detail {

inline LinearizedTraceOptimum linearized_trace_opt(const PositiveDefiniteMatrix& a,
                                                   const ComplexMatrix& k, double e) {
  require_invertible(k.mat(), "linearized trace optimum: K");
  const Mat m = k.mat().adjoint() * mat_power(a, e).mat() * k.mat();
  const PositiveDefiniteMatrix z(pd_pow(m, 1.0 / e));
  const double value = trace_power_psd(m, 1.0 / e);
  const double at_opt = linearized_trace_objective(a, k, e, z);
  if (std::abs(at_opt - value) > 1e-10 * std::max(1.0, std::abs(value)))
    throw Error("linearized trace optimum: objective at the optimizer misses the value");
  return LinearizedTraceOptimum{z, value};
}

}  // namespace detail

// Tr(K* A^s K)^{1/s} as a maximum, 0 < s < 1. The endpoint s = 1 is rejected:
// the formula still holds there but the maximizer is no longer unique.
inline LinearizedTraceOptimum linearized_trace_max(const PositiveDefiniteMatrix& a,
                                                   const ComplexMatrix& k, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw InvalidParams("linearized_trace_max: exponent must lie strictly in (0, 1)");
  return detail::linearized_trace_opt(a, k, s);
}

// Tr(K* A^t K)^{1/t} as a minimum, t > 1; t = 1 rejected for the same reason.
inline LinearizedTraceOptimum linearized_trace_min(const PositiveDefiniteMatrix& a,
                                                   const ComplexMatrix& k, double t) {
  if (!(t > 1.0))
    throw InvalidParams("linearized_trace_min: exponent must be strictly greater than 1");
  return detail::linearized_trace_opt(a, k, t);
}

// Objective in H whose optimum over the positive cone is the trace functional
// of (A, B) at powers (p, q): a minimum when q > 0, a maximum when q < 0.
inline double psi_objective(double p, double q, const PositiveDefiniteMatrix& h,
                            const PositiveDefiniteMatrix& a, const PositiveDefiniteMatrix& b) {
  if (p + q == 0.0) throw InvalidParams("psi_objective: p + q must be nonzero");
  const Mat h_half = mat_power(h, 0.5).mat();
  const Mat h_minus_half = mat_power(h, -0.5).mat();
  const Mat first = h_half * mat_power(a, p).mat() * h_half;
  const Mat second = h_minus_half * mat_power(b, q).mat() * h_minus_half;
  return (p / (p + q)) * detail::trace_power_psd(first, 1.0 / p) +
         (q / (p + q)) * detail::trace_power_psd(second, 1.0 / q);
}

// Dissolved form of psi_objective for 0 < p, q < 1, jointly concave in
// (A, B, K, L):
//   (1/(p+q)) Tr(H^{1/2}A^pH^{1/2}K^{1-p}) - ((1-p)/(p+q)) Tr K
// + (1/(p+q)) Tr(H^{-1/2}B^qH^{-1/2}L^{1-q}) - ((1-q)/(p+q)) Tr L.
inline double linearized_concave_objective(double p, double q, const PositiveDefiniteMatrix& h,
                                           const PositiveDefiniteMatrix& a,
                                           const PositiveDefiniteMatrix& b,
                                           const PositiveDefiniteMatrix& k,
                                           const PositiveDefiniteMatrix& l) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw InvalidParams("linearized_concave_objective: needs 0 < p, q < 1");
  const Mat h_half = mat_power(h, 0.5).mat();
  const Mat h_minus_half = mat_power(h, -0.5).mat();
  const Mat first = h_half * mat_power(a, p).mat() * h_half * mat_power(k, 1.0 - p).mat();
  const Mat second =
      h_minus_half * mat_power(b, q).mat() * h_minus_half * mat_power(l, 1.0 - q).mat();
  const double w = 1.0 / (p + q);
  return w * first.trace().real() - (1.0 - p) * w * k.mat().trace().real() +
         w * second.trace().real() - (1.0 - q) * w * l.mat().trace().real();
}

// Dissolved form for 1 < p <= 2 and -1 < q < 0, jointly convex in (A, B, K, L):
//   (1/(p+q)) Tr(H^{1/2}A^pH^{1/2}K^{1-p}) + ((p-1)/(p+q)) Tr K
// - (1/(p+q)) Tr(H^{1/2}B^{-q}H^{1/2}L^{1+q}) + ((1+q)/(p+q)) Tr L.
inline double linearized_convex_objective(double p, double q, const PositiveDefiniteMatrix& h,
                                          const PositiveDefiniteMatrix& a,
                                          const PositiveDefiniteMatrix& b,
                                          const PositiveDefiniteMatrix& k,
                                          const PositiveDefiniteMatrix& l) {
  if (!(p > 1.0 && p <= 2.0 && q > -1.0 && q < 0.0))
    throw InvalidParams("linearized_convex_objective: needs 1 < p <= 2 and -1 < q < 0");
  const Mat h_half = mat_power(h, 0.5).mat();
  const Mat first = h_half * mat_power(a, p).mat() * h_half * mat_power(k, 1.0 - p).mat();
  const Mat second = h_half * mat_power(b, -q).mat() * h_half * mat_power(l, 1.0 + q).mat();
  const double w = 1.0 / (p + q);
  return w * first.trace().real() + (p - 1.0) * w * k.mat().trace().real() -
         w * second.trace().real() + (1.0 + q) * w * l.mat().trace().real();
}

struct ConvexityReport {
  double p_exp = 0.0;
  bool concave_sense = true;
  int trials = 0;
  int trace_violations = 0;
  double trace_worst_margin = 0.0;
  bool structured_applicable = false;
  int structured_violations = 0;
  double structured_worst_margin = 0.0;
};

// Randomized midpoint probe of joint concavity (0 < p_exp <= 1) or joint
// convexity (-1 <= p_exp < 0) of (A, B) -> Tr(K* A^{p_exp} K B^{1-p_exp}),
// plus the matching structured objective on its parameter range. Margins are
// oriented so that negative values beyond -tol::convexity_slack count as
// violations.
inline ConvexityReport convexity_probe(double p_exp, const ComplexMatrix& k, int trials,
                                       std::uint64_t seed) {
  const bool concave = p_exp > 0.0;
  if (!((p_exp > 0.0 && p_exp <= 1.0) || (p_exp >= -1.0 && p_exp < 0.0)))
    throw InvalidParams("convexity_probe: exponent must lie in [-1,0) or (0,1]");
  if (trials <= 0) throw InvalidParams("convexity_probe: trials must be positive");
  if (k.mat().rows() != k.mat().cols()) throw DimensionMismatch("convexity_probe: K not square");
  detail::require_invertible(k.mat(), "convexity_probe: K");
  const Eigen::Index n = k.mat().rows();

  ConvexityReport report;
  report.p_exp = p_exp;
  report.concave_sense = concave;
  report.trials = trials;
  report.structured_applicable = p_exp > -1.0 && p_exp < 1.0 && p_exp != 0.0;
  report.trace_worst_margin = std::numeric_limits<double>::infinity();
  report.structured_worst_margin = std::numeric_limits<double>::infinity();

  Rng rng(seed);
  auto trace_functional = [&](const PositiveDefiniteMatrix& a, const PositiveDefiniteMatrix& b) {
    const Mat m =
        k.mat().adjoint() * mat_power(a, p_exp).mat() * k.mat() * mat_power(b, 1.0 - p_exp).mat();
    return m.trace().real();
  };

  const double p_struct = concave ? p_exp : 1.0 - p_exp;
  const double q_struct = concave ? 1.0 - p_exp : p_exp;
  const PositiveDefiniteMatrix h_struct(random_pd(rng, n));

  for (int trial = 0; trial < trials; ++trial) {
    const PositiveDefiniteMatrix a1(random_pd(rng, n)), a2(random_pd(rng, n));
    const PositiveDefiniteMatrix b1(random_pd(rng, n)), b2(random_pd(rng, n));
    const PositiveDefiniteMatrix a_mid(0.5 * (a1.mat() + a2.mat()));
    const PositiveDefiniteMatrix b_mid(0.5 * (b1.mat() + b2.mat()));

    const double mean = 0.5 * (trace_functional(a1, b1) + trace_functional(a2, b2));
    const double mid = trace_functional(a_mid, b_mid);
    const double margin = concave ? mid - mean : mean - mid;
    report.trace_worst_margin = std::min(report.trace_worst_margin, margin);
    if (margin < -tol::convexity_slack) ++report.trace_violations;

    if (!report.structured_applicable) continue;
    const PositiveDefiniteMatrix k1(random_pd(rng, n)), k2(random_pd(rng, n));
    const PositiveDefiniteMatrix l1(random_pd(rng, n)), l2(random_pd(rng, n));
    const PositiveDefiniteMatrix k_mid(0.5 * (k1.mat() + k2.mat()));
    const PositiveDefiniteMatrix l_mid(0.5 * (l1.mat() + l2.mat()));

    double v1, v2, v_mid;
    if (concave) {
      v1 = linearized_concave_objective(p_struct, q_struct, h_struct, a1, b1, k1, l1);
      v2 = linearized_concave_objective(p_struct, q_struct, h_struct, a2, b2, k2, l2);
      v_mid = linearized_concave_objective(p_struct, q_struct, h_struct, a_mid, b_mid, k_mid,
                                           l_mid);
    } else {
      v1 = linearized_convex_objective(p_struct, q_struct, h_struct, a1, b1, k1, l1);
      v2 = linearized_convex_objective(p_struct, q_struct, h_struct, a2, b2, k2, l2);
      v_mid =
          linearized_convex_objective(p_struct, q_struct, h_struct, a_mid, b_mid, k_mid, l_mid);
    }
    const double structured_margin =
        concave ? v_mid - 0.5 * (v1 + v2) : 0.5 * (v1 + v2) - v_mid;
    report.structured_worst_margin = std::min(report.structured_worst_margin, structured_margin);
    if (structured_margin < -tol::convexity_slack) ++report.structured_violations;
  }

  if (!report.structured_applicable) report.structured_worst_margin = 0.0;
  return report;
}

}  // namespace alphaz
