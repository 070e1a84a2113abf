#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "alphaz/entropies.hpp"
#include "alphaz/variational.hpp"
#include "fixtures.hpp"

using namespace alphaz;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

VariationalProblem random_problem(Rng& rng, Eigen::Index n, const TripleExponents& exps,
                                  Sense sense) {
  return VariationalProblem(exps, random_invertible(rng, n), random_invertible(rng, n), sense);
}

}  // namespace

TEST_CASE("exponent triple validation") {
  REQUIRE_NOTHROW(TripleExponents(1.0, 2.0, 2.0));
  REQUIRE_NOTHROW(TripleExponents(0.5, 1.0, 1.0));
  REQUIRE_THROWS_AS(TripleExponents(1.0, 2.0, 3.0), InvalidParams);
  REQUIRE_THROWS_AS(TripleExponents(-1.0, -2.0, -2.0), InvalidParams);
  REQUIRE_THROWS_AS(TripleExponents(1.0, 2.0, -2.0), InvalidParams);
}

TEST_CASE("pair equation closed form") {
  SECTION("identity input gives identity outputs") {
    const PairSolution sol =
        solve_pair_equation(PairEquation(Mat(Mat::Identity(2, 2)), 1.0, 2.0, -1.0, 1.0));
    REQUIRE((sol.a.mat() - Mat::Identity(2, 2)).norm() <= 1e-14);
    REQUIRE((sol.b.mat() - Mat::Identity(2, 2)).norm() <= 1e-14);
  }
  SECTION("scalar oracle") {
    Mat k(1, 1);
    k(0, 0) = 2.0;
    const PairSolution sol = solve_pair_equation(PairEquation(k, 1.0, 2.0, -1.0, 1.0));
    REQUIRE(std::abs(sol.a.mat()(0, 0).real() - std::pow(2.0, 4.0 / 3.0)) <= 1e-12);
    REQUIRE(std::abs(sol.b.mat()(0, 0).real() - std::pow(2.0, 2.0 / 3.0)) <= 1e-12);
    REQUIRE(sol.residual_first <= 1e-12);
    REQUIRE(sol.residual_second <= 1e-12);
  }
  SECTION("random instances satisfy the system") {
    Rng rng(501);
    for (int rep = 0; rep < 100; ++rep) {
      const Mat k = random_invertible(rng, 3);
      const PairSolution sol = solve_pair_equation(PairEquation(k, 1.0, 2.5, -1.0, 0.5));
      const Mat lhs1 = mat_power(sol.a, 1.0).mat();
      const Mat rhs1 = k * mat_power(sol.b, -1.0).mat() * k.adjoint();
      REQUIRE((lhs1 - rhs1).norm() <= 1e-9 * std::max(1.0, lhs1.norm()));
      const Mat lhs2 = mat_power(sol.a, 2.5).mat();
      const Mat rhs2 = k * mat_power(sol.b, 0.5).mat() * k.adjoint();
      REQUIRE((lhs2 - rhs2).norm() <= 1e-9 * std::max(1.0, lhs2.norm()));
    }
  }
  SECTION("degenerate coefficients are rejected") {
    REQUIRE_THROWS_AS(PairEquation(Mat(Mat::Identity(2, 2)), 1.0, 2.0, 1.0, 2.0),
                      DegenerateCoefficients);
    REQUIRE_THROWS_AS(PairEquation(Mat(Mat::Identity(2, 2)), 1.0, 2.0, 0.5, 1.0 + 1e-14),
                      DegenerateCoefficients);
    REQUIRE_THROWS_AS(PairEquation(Mat(diag2(1.0, 0.0)), 1.0, 2.0, -1.0, 1.0), Singular);
  }
}

TEST_CASE("closed-form minimum") {
  SECTION("identity problem") {
    const VariationalProblem vp(TripleExponents(1.0, 2.0, 2.0), Mat(Mat::Identity(3, 3)),
                                Mat(Mat::Identity(3, 3)), Sense::minimize);
    const Optimum opt = closed_form_min(vp);
    REQUIRE((opt.h.mat() - Mat::Identity(3, 3)).norm() <= 1e-12);
    REQUIRE(std::abs(opt.value - 3.0) <= 1e-12);
  }
  SECTION("diagonal oracle") {
    const TripleExponents exps(1.0, 2.0, 2.0);
    const Mat y = diag2(0.7, 1.9);
    const VariationalProblem vp(exps, Mat(Mat::Identity(2, 2)), y, Sense::minimize);
    const Optimum opt = closed_form_min(vp);
    const double expo = 2.0 - 2.0 * exps.r0 / exps.r2;
    const Mat expect_h = diag2(std::pow(0.7, expo), std::pow(1.9, expo));
    REQUIRE((opt.h.mat() - expect_h).norm() <= 1e-12);
    const double expect_v = std::pow(0.7, 2.0) + std::pow(1.9, 2.0);
    REQUIRE(std::abs(opt.value - expect_v) <= 1e-12 * expect_v);
  }
  SECTION("random problems match the direct trace power") {
    Rng rng(502);
    for (int rep = 0; rep < 25; ++rep) {
      const VariationalProblem vp = random_problem(rng, 3, TripleExponents(1.0, 2.0, 2.0),
                                                   Sense::minimize);
      const Optimum opt = closed_form_min(vp);
      const Mat xy = vp.x * vp.y;
      const double direct = detail::trace_power_psd(xy.adjoint() * xy, 1.0);
      REQUIRE(std::abs(opt.value - direct) <= 1e-9 * std::max(1.0, direct));
    }
  }
  SECTION("sense mismatch is rejected") {
    const VariationalProblem vp(TripleExponents(1.0, 2.0, 2.0), Mat(Mat::Identity(2, 2)),
                                Mat(Mat::Identity(2, 2)), Sense::maximize);
    REQUIRE_THROWS_AS(closed_form_min(vp), InvalidParams);
  }
}

TEST_CASE("closed-form maximum") {
  SECTION("identity problem") {
    const VariationalProblem vp(TripleExponents(1.0, 2.0, 2.0), Mat(Mat::Identity(3, 3)),
                                Mat(Mat::Identity(3, 3)), Sense::maximize);
    const Optimum opt = closed_form_max(vp);
    REQUIRE((opt.h.mat() - Mat::Identity(3, 3)).norm() <= 1e-12);
    REQUIRE(std::abs(opt.value - 3.0) <= 1e-12);
  }
  SECTION("scalar oracle") {
    Mat x(1, 1), y(1, 1);
    x(0, 0) = 1.0;
    y(0, 0) = 1.7;
    const TripleExponents exps(1.0, 2.0, 2.0);
    const VariationalProblem vp(exps, x, y, Sense::maximize);
    const Optimum opt = closed_form_max(vp);
    REQUIRE(std::abs(opt.h.mat()(0, 0).real() - std::pow(1.7, 2.0 + 2.0 * exps.r1 / exps.r2)) <=
            1e-12 * 10.0);
    REQUIRE(std::abs(opt.value - std::pow(1.7, 2.0 * exps.r1)) <= 1e-12 * 10.0);
  }
  SECTION("random problems match the direct trace power") {
    Rng rng(503);
    for (int rep = 0; rep < 25; ++rep) {
      const VariationalProblem vp = random_problem(rng, 3, TripleExponents(0.5, 1.0, 1.0),
                                                   Sense::maximize);
      const Optimum opt = closed_form_max(vp);
      const Mat xy = vp.x * vp.y;
      const double direct = detail::trace_power_psd(xy.adjoint() * xy, 2.0 * 1.0 / 2.0);
      REQUIRE(std::abs(opt.value - direct) <= 1e-9 * std::max(1.0, direct));
    }
  }
}

TEST_CASE("objective evaluation brackets the closed-form value") {
  Rng rng(504);
  const TripleExponents exps(1.0, 2.0, 2.0);
  for (Sense sense : {Sense::minimize, Sense::maximize}) {
    const VariationalProblem vp = random_problem(rng, 3, exps, sense);
    const Optimum opt = sense == Sense::minimize ? closed_form_min(vp) : closed_form_max(vp);
    REQUIRE(std::abs(eval_f(vp, opt.h) - opt.value) <= 1e-12 * std::max(1.0, opt.value));
    for (int rep = 0; rep < 30; ++rep) {
      const PositiveDefiniteMatrix h(random_pd(rng, 3));
      const double f = eval_f(vp, h);
      if (sense == Sense::minimize)
        REQUIRE(f >= opt.value - 1e-10 * std::max(1.0, opt.value));
      else
        REQUIRE(f <= opt.value + 1e-10 * std::max(1.0, opt.value));
    }
  }
}

TEST_CASE("gradient of the objective") {
  SECTION("identity problem has zero gradient at the identity") {
    const VariationalProblem vp(TripleExponents(1.0, 2.0, 2.0), Mat(Mat::Identity(2, 2)),
                                Mat(Mat::Identity(2, 2)), Sense::minimize);
    REQUIRE(grad_phi(vp, PositiveDefiniteMatrix(Mat(Mat::Identity(2, 2)))).norm() <= 1e-14);
  }
  SECTION("vanishes at the closed-form optimizer") {
    Rng rng(505);
    for (Sense sense : {Sense::minimize, Sense::maximize}) {
      for (int rep = 0; rep < 10; ++rep) {
        const VariationalProblem vp = random_problem(rng, 3, TripleExponents(1.0, 2.0, 2.0),
                                                     sense);
        const Optimum opt = sense == Sense::minimize ? closed_form_min(vp) : closed_form_max(vp);
        const double scale = std::max(1.0, std::abs(opt.value));
        REQUIRE(grad_phi(vp, opt.h).norm() <= 1e-8 * scale);
      }
    }
  }
  SECTION("matches central finite differences") {
    Rng rng(506);
    for (Sense sense : {Sense::minimize, Sense::maximize}) {
      const VariationalProblem vp = random_problem(rng, 3, TripleExponents(1.0, 2.0, 2.0), sense);
      const PositiveDefiniteMatrix h(random_pd(rng, 3, 0.8, 1.6));
      const Mat g = grad_phi(vp, h);
      for (int dir_i = 0; dir_i < 10; ++dir_i) {
        Mat dir = random_hermitian(rng, 3);
        dir /= dir.norm();
        const double analytic = (g * dir).trace().real();
        const double numeric = fd_directional_derivative(vp, h, dir);
        REQUIRE(std::abs(analytic - numeric) <= 1e-5 * std::max(1.0, std::abs(numeric)));
      }
    }
  }
}

TEST_CASE("optimizer reaches the closed form from generic starts") {
  SECTION("starting at the optimizer converges immediately") {
    Rng rng(507);
    const VariationalProblem vp = random_problem(rng, 2, TripleExponents(1.0, 2.0, 2.0),
                                                 Sense::minimize);
    const Optimum opt = closed_form_min(vp);
    const OptimizeResult res = optimize_pd(vp, opt.h);
    REQUIRE(res.iterations <= 1);
    REQUIRE((res.h.mat() - opt.h.mat()).norm() <= 1e-8);
  }
  SECTION("identity start, 2x2 minimization") {
    Rng rng(508);
    const VariationalProblem vp = random_problem(rng, 2, TripleExponents(1.0, 2.0, 2.0),
                                                 Sense::minimize);
    const Optimum opt = closed_form_min(vp);
    const OptimizeResult res = optimize_pd(vp, PositiveDefiniteMatrix(Mat(Mat::Identity(2, 2))));
    REQUIRE((res.h.mat() - opt.h.mat()).norm() <= 1e-5 * std::max(1.0, opt.h.mat().norm()));
  }
  SECTION("multi-start agreement, 3x3 maximization") {
    Rng rng(509);
    const VariationalProblem vp = random_problem(rng, 3, TripleExponents(1.0, 2.0, 2.0),
                                                 Sense::maximize);
    const Optimum opt = closed_form_max(vp);
    for (int start = 0; start < 5; ++start) {
      Rng start_rng(900 + static_cast<std::uint64_t>(start));
      const OptimizeResult res = optimize_pd(vp, PositiveDefiniteMatrix(random_pd(start_rng, 3)));
      REQUIRE((res.h.mat() - opt.h.mat()).norm() <= 1e-5 * std::max(1.0, opt.h.mat().norm()));
      REQUIRE(res.iterations < tol::optimize_iter_cap);
    }
  }
}

TEST_CASE("one-matrix linearized trace formulas") {
  SECTION("worked diagonal minimum") {
    const PositiveDefiniteMatrix a(diag2(1.0, 2.0));
    const LinearizedTraceOptimum opt = linearized_trace_min(a, Mat(Mat::Identity(2, 2)), 2.0);
    REQUIRE((opt.z.mat() - diag2(1.0, 2.0)).norm() <= 1e-13);
    REQUIRE(std::abs(opt.value - 3.0) <= 1e-13);
    const double at_z = linearized_trace_objective(a, Mat(Mat::Identity(2, 2)), 2.0, opt.z);
    REQUIRE(std::abs(at_z - 3.0) <= 1e-13);
  }
  SECTION("unitary K with identity A maximizes at the identity") {
    Rng rng(510);
    const Mat u = random_unitary(rng, 3);
    const LinearizedTraceOptimum opt =
        linearized_trace_max(PositiveDefiniteMatrix(Mat(Mat::Identity(3, 3))), u, 0.5);
    REQUIRE((opt.z.mat() - Mat::Identity(3, 3)).norm() <= 1e-12);
    REQUIRE(std::abs(opt.value - 3.0) <= 1e-12);
  }
  SECTION("local optimality under random perturbations") {
    Rng rng(511);
    const PositiveDefiniteMatrix a(random_pd(rng, 3));
    const Mat k = random_invertible(rng, 3);
    const LinearizedTraceOptimum mx = linearized_trace_max(a, k, 0.5);
    const LinearizedTraceOptimum mn = linearized_trace_min(a, k, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
      Mat pert = random_hermitian(rng, 3);
      pert /= pert.norm();
      const PositiveDefiniteMatrix z_up(mx.z.mat() + 1e-3 * pert);
      REQUIRE(linearized_trace_objective(a, k, 0.5, z_up) <= mx.value + 1e-10);
      const PositiveDefiniteMatrix z_dn(mn.z.mat() + 1e-3 * pert);
      REQUIRE(linearized_trace_objective(a, k, 2.0, z_dn) >= mn.value - 1e-10);
    }
  }
  SECTION("degenerate exponents are rejected") {
    const PositiveDefiniteMatrix a(diag2(1.0, 2.0));
    REQUIRE_THROWS_AS(linearized_trace_max(a, Mat(Mat::Identity(2, 2)), 1.0), InvalidParams);
    REQUIRE_THROWS_AS(linearized_trace_min(a, Mat(Mat::Identity(2, 2)), 1.0), InvalidParams);
    REQUIRE_THROWS_AS(linearized_trace_max(a, Mat(Mat::Identity(2, 2)), 1.5), InvalidParams);
  }
}

TEST_CASE("variational bridge to the trace functional") {
  Rng rng(512);
  SECTION("positive powers: minimum form") {
    const ParamPoint pt(0.5, 1.2);  // p, q both in (0, 1)
    const PositiveDefiniteMatrix a(random_pd(rng, 3));
    const PositiveDefiniteMatrix b(random_pd(rng, 3));
    const double target = psi(pt, a, b);
    const VariationalProblem vp(TripleExponents(1.0 / (pt.p + pt.q), 1.0 / pt.p, 1.0 / pt.q),
                                mat_power(a, pt.p / 2.0).mat(), mat_power(b, pt.q / 2.0).mat(),
                                Sense::minimize);
    const Optimum opt = closed_form_min(vp);
    REQUIRE(std::abs(opt.value - target) <= 1e-9 * std::max(1.0, target));
    REQUIRE(std::abs(psi_objective(pt.p, pt.q, opt.h, a, b) - target) <=
            1e-9 * std::max(1.0, target));
  }
  SECTION("negative q: maximum form") {
    const ParamPoint pt(1.5, 1.0);  // p = 1.5, q = -0.5
    const PositiveDefiniteMatrix a(random_pd(rng, 3));
    const PositiveDefiniteMatrix b(random_pd(rng, 3));
    const double target = psi(pt, a, b);
    const VariationalProblem vp(
        TripleExponents(1.0 / pt.p, 1.0 / (pt.p + pt.q), 1.0 / (-pt.q)),
        mat_power(a, pt.p / 2.0).mat(), mat_power(b, pt.q / 2.0).mat(), Sense::maximize);
    const Optimum opt = closed_form_max(vp);
    REQUIRE(std::abs(opt.value - target) <= 1e-9 * std::max(1.0, target));
    REQUIRE(std::abs(psi_objective(pt.p, pt.q, opt.h, a, b) - target) <=
            1e-9 * std::max(1.0, target));
  }
  SECTION("objective agrees with eval_f under both substitutions") {
    const PositiveDefiniteMatrix a(random_pd(rng, 2));
    const PositiveDefiniteMatrix b(random_pd(rng, 2));
    const PositiveDefiniteMatrix h(random_pd(rng, 2));
    {
      const ParamPoint pt(0.5, 1.2);
      const VariationalProblem vp(TripleExponents(1.0 / (pt.p + pt.q), 1.0 / pt.p, 1.0 / pt.q),
                                  mat_power(a, pt.p / 2.0).mat(), mat_power(b, pt.q / 2.0).mat(),
                                  Sense::minimize);
      REQUIRE(std::abs(eval_f(vp, h) - psi_objective(pt.p, pt.q, h, a, b)) <= 1e-10);
    }
    {
      const ParamPoint pt(1.5, 1.0);
      const VariationalProblem vp(
          TripleExponents(1.0 / pt.p, 1.0 / (pt.p + pt.q), 1.0 / (-pt.q)),
          mat_power(a, pt.p / 2.0).mat(), mat_power(b, pt.q / 2.0).mat(), Sense::maximize);
      REQUIRE(std::abs(eval_f(vp, h) - psi_objective(pt.p, pt.q, h, a, b)) <= 1e-10);
    }
  }
}

TEST_CASE("joint concavity and convexity probes") {
  Rng rng(513);
  const Mat k = random_invertible(rng, 3);

  SECTION("concave range") {
    const ConvexityReport rep = convexity_probe(0.5, k, 200, 601);
    REQUIRE(rep.trace_violations == 0);
    REQUIRE(rep.structured_applicable);
    REQUIRE(rep.structured_violations == 0);
    REQUIRE(rep.trace_worst_margin >= -tol::convexity_slack);
  }
  SECTION("convex range") {
    const ConvexityReport rep = convexity_probe(-0.5, k, 200, 602);
    REQUIRE(rep.trace_violations == 0);
    REQUIRE(rep.structured_applicable);
    REQUIRE(rep.structured_violations == 0);
  }
  SECTION("linear endpoint") {
    const ConvexityReport rep = convexity_probe(1.0, k, 50, 603);
    REQUIRE(rep.trace_violations == 0);
    REQUIRE_FALSE(rep.structured_applicable);
    REQUIRE(std::abs(rep.trace_worst_margin) <= 1e-12);
  }
  SECTION("endpoint -1 skips the structured probe") {
    const ConvexityReport rep = convexity_probe(-1.0, k, 50, 604);
    REQUIRE(rep.trace_violations == 0);
    REQUIRE_FALSE(rep.structured_applicable);
  }
  SECTION("out-of-range exponents are rejected") {
    REQUIRE_THROWS_AS(convexity_probe(0.0, k, 10, 605), InvalidParams);
    REQUIRE_THROWS_AS(convexity_probe(1.5, k, 10, 605), InvalidParams);
    REQUIRE_THROWS_AS(convexity_probe(-1.5, k, 10, 605), InvalidParams);
  }
}
