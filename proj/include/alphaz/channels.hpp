#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "linalg.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace alphaz {

// Density operator. Faithful (positive definite) by default; pure states carry
// a rank-1 flag that exempts them from the faithfulness invariant.
class QuantumState {
 public:
  explicit QuantumState(const Mat& m) : m_(m), pure_(false) {
    validate_trace();
    PositiveDefiniteMatrix check(m_);  // faithfulness invariant
    m_ = check.mat();
  }

  static QuantumState pure_from_vector(const CVec& psi) {
    if (psi.size() < 1) throw DimensionMismatch("pure state: empty vector");
    const double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-12) throw InvalidParams("pure state: vector not normalized");
    QuantumState s;
    s.m_ = (psi / n) * (psi / n).adjoint();
    s.pure_ = true;
    return s;
  }

  const Mat& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  bool is_pure() const { return pure_; }

 private:
  QuantumState() = default;
  void validate_trace() {
    if (m_.rows() != m_.cols()) throw DimensionMismatch("QuantumState: matrix must be square");
    const double tr = m_.trace().real();
    if (std::abs(m_.trace() - cplx(1.0)) > 1e-12)
      throw InvalidParams("QuantumState: trace " + std::to_string(tr) + " is not 1");
    m_ /= m_.trace();  // exact renormalization
  }

  Mat m_;
  bool pure_ = false;
};

// Structure tags carried by factory-built channels. They describe the same
// map as the Kraus list and are only consulted by stinespring_dilate.
struct UnitaryMixture {
  std::vector<Mat> unitaries;
  std::vector<double> weights;
};

struct ProductTraceLayout {
  int dim_keep = 1;    // H_A, the surviving factor
  int dim_traced = 1;  // H_B, the factor traced out (rightmost slot of H)
};

using ChannelStructure = std::variant<std::monostate, UnitaryMixture, ProductTraceLayout>;

// Completely positive trace-preserving map in Kraus form.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<Mat> kraus, std::string kind_name = "generic",
                          ChannelStructure structure = std::monostate{})
      : kraus_(std::move(kraus)), kind_(std::move(kind_name)), structure_(std::move(structure)) {
    if (kraus_.empty()) throw InvalidParams("QuantumChannel: empty Kraus list");
    dim_out_ = kraus_[0].rows();
    dim_in_ = kraus_[0].cols();
    for (const Mat& e : kraus_) {
      if (e.rows() != dim_out_ || e.cols() != dim_in_)
        throw DimensionMismatch("QuantumChannel: inconsistent Kraus shapes");
      if (!all_finite(e)) throw InvalidParams("QuantumChannel: non-finite Kraus entry");
    }
    Mat sum = Mat::Zero(dim_in_, dim_in_);
    for (const Mat& e : kraus_) sum += e.adjoint() * e;
    const double tp_defect = (sum - Mat::Identity(dim_in_, dim_in_)).norm();
    if (tp_defect > tol::kraus)
      throw InvalidParams("QuantumChannel: trace preservation defect " +
                          std::to_string(tp_defect));

    // Complete positivity witness: the Choi matrix of a Kraus list is PSD up
    // to roundoff; this guards degenerate floating-point input.
    Mat c = Mat::Zero(dim_in_ * dim_out_, dim_in_ * dim_out_);
    for (const Mat& k : kraus_) {
      CVec r = CVec::Zero(dim_in_ * dim_out_);
      for (Eigen::Index i = 0; i < dim_in_; ++i)
        for (Eigen::Index a = 0; a < dim_out_; ++a) r(i * dim_out_ + a) = k(a, i);
      c += r * r.adjoint();
    }
    const EigSystem ce = detail::eig_hermitian(0.5 * (c + c.adjoint()));
    if (ce.values(0) < -tol::choi_psd)
      throw InvalidParams("QuantumChannel: Choi min eigenvalue " + std::to_string(ce.values(0)));
  }

  Eigen::Index dim_in() const { return dim_in_; }
  Eigen::Index dim_out() const { return dim_out_; }
  const std::vector<Mat>& kraus() const { return kraus_; }
  const std::string& kind() const { return kind_; }
  const ChannelStructure& structure() const { return structure_; }

  Mat apply(const Mat& omega) const {
    if (omega.rows() != dim_in_ || omega.cols() != dim_in_)
      throw DimensionMismatch("apply: state dimension mismatch");
    Mat out = Mat::Zero(dim_out_, dim_out_);
    for (const Mat& e : kraus_) out += e * omega * e.adjoint();
    return out;
  }

  // Hilbert-Schmidt adjoint action, sum_k E_k* M E_k.
  Mat apply_adjoint(const Mat& m) const {
    if (m.rows() != dim_out_ || m.cols() != dim_out_)
      throw DimensionMismatch("apply_adjoint: dimension mismatch");
    Mat out = Mat::Zero(dim_in_, dim_in_);
    for (const Mat& e : kraus_) out += e.adjoint() * m * e;
    return out;
  }

 private:
  std::vector<Mat> kraus_;
  std::string kind_;
  ChannelStructure structure_;
  Eigen::Index dim_in_ = 0;
  Eigen::Index dim_out_ = 0;
};

// Unital completely positive map dual to a channel.
class AdjointChannel {
 public:
  explicit AdjointChannel(const QuantumChannel& e) : channel_(e) {}
  Eigen::Index dim_in() const { return channel_.dim_out(); }
  Eigen::Index dim_out() const { return channel_.dim_in(); }
  Mat apply(const Mat& m) const { return channel_.apply_adjoint(m); }

 private:
  QuantumChannel channel_;
};

inline AdjointChannel adjoint(const QuantumChannel& e) { return AdjointChannel(e); }

// Choi matrix on (in (x) out): (I (x) E) applied to the unnormalized maximally
// entangled projector.
inline HermitianMatrix choi(const QuantumChannel& e) {
  const Eigen::Index n = e.dim_in(), m = e.dim_out();
  Mat c = Mat::Zero(n * m, n * m);
  for (const Mat& k : e.kraus()) {
    CVec r = CVec::Zero(n * m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index a = 0; a < m; ++a) r(i * m + a) = k(a, i);
    c += r * r.adjoint();
  }
  return HermitianMatrix(c);
}

inline void require_cp(const QuantumChannel& e) {
  const HermitianMatrix c = choi(e);
  if (c.min_eigenvalue() < -tol::choi_psd)
    throw InvalidParams("channel is not completely positive: Choi min eigenvalue " +
                        std::to_string(c.min_eigenvalue()));
}

// Heisenberg-Weyl unitaries U_{k,l} = sum_r eta^{rl} |k+r><r|, eta = e^{2 pi i/d},
// k, l = 1..d as in the source convention; storage below is 0-based with the +1
// shift applied here, and the returned list is ordered with j = (k-1)*d + (l-1).
inline std::vector<Mat> heisenberg_weyl(int d) {
  if (d < 1) throw InvalidParams("heisenberg_weyl: d must be >= 1");
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(d) * d);
  const double theta = 2.0 * M_PI / d;
  for (int k = 1; k <= d; ++k)
    for (int l = 1; l <= d; ++l) {
      Mat u = Mat::Zero(d, d);
      for (int r0 = 0; r0 < d; ++r0) {
        const int row = (k + r0) % d;
        // eta^{rl} depends on rl mod d only; reducing first keeps U_{d,d} exact.
        const int pidx = static_cast<int>((static_cast<long long>(r0 + 1) * l) % d);
        const double phase = theta * pidx;
        u(row, r0) = cplx(std::cos(phase), std::sin(phase));
      }
      out.push_back(std::move(u));
    }
  return out;
}

// (1/d^2) sum_{k,l} U_{k,l} rho U_{k,l}* ; equals Tr(rho) I/d.
inline Mat twirl(const Mat& rho, int d) {
  if (rho.rows() != d || rho.cols() != d) throw DimensionMismatch("twirl: dimension mismatch");
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-10)
    throw InvalidParams("twirl: input must have trace 1");
  Mat acc = Mat::Zero(d, d);
  for (const Mat& u : heisenberg_weyl(d)) acc += u * rho * u.adjoint();
  return acc / static_cast<double>(d * d);
}

// Unitary dilation of a channel: E(w) = Tr_{12} U (w (x) delta) U* with factor
// order H (x) H' (x) K and delta pure on H' (x) K.
struct StinespringDilation {
  Eigen::Index dim_in = 0;
  Eigen::Index dim_out = 0;
  Eigen::Index env_dim = 0;
  Mat unitary;             // on H (x) H' (x) K
  CVec env_vector;         // delta = env_vector env_vector*
  QuantumState env_state;  // pure state wrapper over env_vector

  std::vector<int> factor_dims() const {
    return {static_cast<int>(dim_in), static_cast<int>(env_dim), static_cast<int>(dim_out)};
  }
};

inline Mat dilation_apply(const StinespringDilation& d, const Mat& omega) {
  const Mat big = d.unitary * kron(omega, d.env_state.mat()) * d.unitary.adjoint();
  return partial_trace(big, d.factor_dims(), {1, 2});
}

// Adjoint realization through the dilation: Tr_{23}[U* (1 (x) M) U (1 (x) delta)].
inline Mat dilation_adjoint_apply(const StinespringDilation& d, const Mat& m) {
  const Eigen::Index n = d.dim_in;
  const Mat lifted = kron(Mat::Identity(n * d.env_dim, n * d.env_dim), m);
  const Mat seeded = kron(Mat::Identity(n, n), d.env_state.mat());
  return partial_trace(d.unitary.adjoint() * lifted * d.unitary * seeded, d.factor_dims(),
                       {2, 3});
}

namespace detail {

// Generic dilation: Kraus isometry W psi = sum_k u_0 (x) |k> (x) E_k psi on the
// support H (x) e, completed by Gram-Schmidt over a seeded random complement.
inline Mat complete_isometry_columns(const Mat& q, std::uint64_t seed) {
  const Eigen::Index big = q.rows(), small = q.cols();
  for (int attempt = 0; attempt < 3; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt) * 7919);
    Mat basis(big, big);
    basis.leftCols(small) = q;
    const Mat g = ginibre(rng, big, big - small);
    bool ok = true;
    for (Eigen::Index j = 0; j < big - small; ++j) {
      CVec v = g.col(j);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index i = 0; i < small + j; ++i)
          v -= basis.col(i) * (basis.col(i).adjoint() * v)(0);
      const double nn = v.norm();
      if (nn < 1e-8) {
        ok = false;
        break;
      }
      basis.col(small + j) = v / nn;
    }
    if (ok) return basis.rightCols(big - small);
  }
  throw CompletionFailure("unitary completion degenerated after 3 reseeded attempts");
}

inline StinespringDilation dilate_generic(const QuantumChannel& e, std::uint64_t seed) {
  const Eigen::Index n = e.dim_in(), nout = e.dim_out();
  const Eigen::Index m = static_cast<Eigen::Index>(e.kraus().size());
  const Eigen::Index big = n * m * nout;

  // Support images w_i = u_0 (x) sum_k |k> (x) E_k h_i.
  Mat q = Mat::Zero(big, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < m; ++k)
      for (Eigen::Index a = 0; a < nout; ++a) q((0 * m + k) * nout + a, i) = e.kraus()[k](a, i);

  const Mat rest = complete_isometry_columns(q, seed);

  // Support positions h_i (x) e with e = |0>_{H'} (x) |0>_K sit at stride m*nout.
  Mat u = Mat::Zero(big, big);
  std::vector<bool> is_support(big, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    u.col(i * m * nout) = q.col(i);
    is_support[i * m * nout] = true;
  }
  Eigen::Index next = 0;
  for (Eigen::Index c = 0; c < big; ++c)
    if (!is_support[c]) u.col(c) = rest.col(next++);

  const double unit_defect = (u.adjoint() * u - Mat::Identity(big, big)).norm();
  if (unit_defect > 1e-10)
    throw CompletionFailure("completed matrix is not unitary, defect " +
                            std::to_string(unit_defect));

  CVec ev = CVec::Zero(m * nout);
  ev(0) = 1.0;
  return StinespringDilation{n, nout, m, std::move(u), ev, QuantumState::pure_from_vector(ev)};
}

// Controlled-swap dilation for mixed-unitary channels:
// U (psi (x) |t> (x) phi) = phi (x) |t> (x) Z_t psi, delta built from the weights.
inline StinespringDilation dilate_unitary_mixture(const QuantumChannel& e,
                                                  const UnitaryMixture& mix) {
  const Eigen::Index n = e.dim_in();
  const Eigen::Index m = static_cast<Eigen::Index>(mix.unitaries.size());
  const Eigen::Index big = n * m * n;

  Mat u = Mat::Zero(big, big);
  for (Eigen::Index t = 0; t < m; ++t) {
    const Mat& z = mix.unitaries[t];
    // Column of input basis (i, t, a); image is (a', t, row) weighted by z(row, i).
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index a = 0; a < n; ++a) {
        const Eigen::Index col = (i * m + t) * n + a;
        for (Eigen::Index row = 0; row < n; ++row)
          u((a * m + t) * n + row, col) = z(row, i);
      }
  }

  CVec ev = CVec::Zero(m * n);
  for (Eigen::Index t = 0; t < m; ++t) ev(t * n + 0) = std::sqrt(mix.weights[t]);

  StinespringDilation d{n, n, m, std::move(u), ev, QuantumState::pure_from_vector(ev)};
  return d;
}

// Slot-reversal dilation for the partial-trace channel on H_A (x) H_B:
// U (a (x) b (x) b' (x) k) = k (x) b' (x) b (x) a with H' = H_B', K = H_A.
inline StinespringDilation dilate_partial_trace(const ProductTraceLayout& layout) {
  const Eigen::Index na = layout.dim_keep, nb = layout.dim_traced;
  const Eigen::Index big = (na * nb) * nb * na;
  Mat u = Mat::Zero(big, big);
  for (Eigen::Index ia = 0; ia < na; ++ia)
    for (Eigen::Index ib = 0; ib < nb; ++ib)
      for (Eigen::Index ibp = 0; ibp < nb; ++ibp)
        for (Eigen::Index ik = 0; ik < na; ++ik) {
          const Eigen::Index col = ((ia * nb + ib) * nb + ibp) * na + ik;
          const Eigen::Index row = ((ik * nb + ibp) * nb + ib) * na + ia;
          u(row, col) = 1.0;
        }

  CVec ev = CVec::Zero(nb * na);
  ev(0) = 1.0;
  StinespringDilation d{na * nb, na, nb, std::move(u), ev, QuantumState::pure_from_vector(ev)};
  return d;
}

}  // namespace detail

inline StinespringDilation stinespring_dilate(const QuantumChannel& e,
                                              std::uint64_t seed = 0xA1FA5EEDULL) {
  StinespringDilation d = [&] {
    if (const auto* mix = std::get_if<UnitaryMixture>(&e.structure()))
      return detail::dilate_unitary_mixture(e, *mix);
    if (const auto* layout = std::get_if<ProductTraceLayout>(&e.structure()))
      return detail::dilate_partial_trace(*layout);
    return detail::dilate_generic(e, seed);
  }();

  // Reproduction invariant on probe states.
  Rng rng(17);
  for (int probe = 0; probe < 3; ++probe) {
    const Mat g = ginibre(rng, e.dim_in(), e.dim_in());
    Mat omega = g * g.adjoint();
    omega /= omega.trace();
    const double defect = (e.apply(omega) - dilation_apply(d, omega)).norm();
    if (defect > tol::dilation)
      throw CompletionFailure("dilation fails to reproduce channel, defect " +
                              std::to_string(defect));
  }
  return d;
}

// V_j, W_j of the twirled decomposition together with the dilation they live on.
struct TwirledDecomposition {
  std::vector<Mat> v;
  std::vector<Mat> w;
  int d = 0;  // dim of H (x) H'
  StinespringDilation dilation;
};

inline TwirledDecomposition twirled_decomposition(const QuantumChannel& e, const QuantumState& rho,
                                                  const QuantumState& sigma,
                                                  std::uint64_t seed = 0xA1FA5EEDULL) {
  if (rho.dim() != e.dim_in() || sigma.dim() != e.dim_in())
    throw DimensionMismatch("twirled_decomposition: state dimension mismatch");
  StinespringDilation dil = stinespring_dilate(e, seed);
  const int d = static_cast<int>(dil.dim_in * dil.env_dim);
  const Eigen::Index nout = dil.dim_out;

  const Mat rho_big = dil.unitary * kron(rho.mat(), dil.env_state.mat()) * dil.unitary.adjoint();
  const Mat sigma_big =
      dil.unitary * kron(sigma.mat(), dil.env_state.mat()) * dil.unitary.adjoint();

  std::vector<Mat> vs, ws;
  const std::vector<Mat> hw = heisenberg_weyl(d);
  vs.reserve(hw.size());
  ws.reserve(hw.size());
  for (const Mat& u : hw) {
    const Mat uj = kron(u, Mat::Identity(nout, nout));
    vs.push_back(uj * rho_big * uj.adjoint());
    ws.push_back(uj * sigma_big * uj.adjoint());
  }
  return TwirledDecomposition{std::move(vs), std::move(ws), d, std::move(dil)};
}

// ---- Channel factories ----

inline QuantumChannel make_unitary_channel(const Mat& u) {
  if (u.rows() != u.cols()) throw InvalidParams("unitary channel: matrix must be square");
  if ((u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).norm() > 1e-10)
    throw InvalidParams("unitary channel: matrix is not unitary");
  UnitaryMixture mix{{u}, {1.0}};
  return QuantumChannel({u}, "unitary", std::move(mix));
}

inline QuantumChannel make_identity_channel(Eigen::Index dim) {
  QuantumChannel c = make_unitary_channel(Mat::Identity(dim, dim));
  return QuantumChannel(c.kraus(), "identity", c.structure());
}

// Pinching onto the block-diagonal algebra given by contiguous block sizes.
// Kraus operators are the block projections; the equivalent uniform mixture of
// phase unitaries Z_t = sum_b eta^{bt} P_b is attached for dilation purposes.
inline QuantumChannel make_pinching_channel(const std::vector<int>& block_sizes) {
  if (block_sizes.empty()) throw InvalidParams("pinching channel: no blocks");
  int dim = 0;
  for (int b : block_sizes) {
    if (b < 1) throw InvalidParams("pinching channel: block sizes must be >= 1");
    dim += b;
  }
  const int m = static_cast<int>(block_sizes.size());
  std::vector<Mat> kraus;
  int offset = 0;
  for (int b : block_sizes) {
    Mat p = Mat::Zero(dim, dim);
    for (int i = 0; i < b; ++i) p(offset + i, offset + i) = 1.0;
    kraus.push_back(std::move(p));
    offset += b;
  }

  UnitaryMixture mix;
  mix.weights.assign(m, 1.0 / m);
  const double theta = 2.0 * M_PI / m;
  for (int t = 0; t < m; ++t) {
    Mat z = Mat::Zero(dim, dim);
    int off = 0;
    for (int b = 0; b < m; ++b) {
      const double phase = theta * b * t;
      const cplx ph(std::cos(phase), std::sin(phase));
      for (int i = 0; i < block_sizes[b]; ++i) z(off + i, off + i) = ph;
      off += block_sizes[b];
    }
    mix.unitaries.push_back(std::move(z));
  }
  return QuantumChannel(std::move(kraus), "pinching", std::move(mix));
}

// Trace out the second factor of H_A (x) H_B.
inline QuantumChannel make_partial_trace_channel(int dim_keep, int dim_traced) {
  if (dim_keep < 1 || dim_traced < 1) throw InvalidParams("partial trace channel: bad dims");
  std::vector<Mat> kraus;
  for (int b = 0; b < dim_traced; ++b) {
    Mat e = Mat::Zero(dim_keep, dim_keep * dim_traced);
    for (int i = 0; i < dim_keep; ++i) e(i, i * dim_traced + b) = 1.0;
    kraus.push_back(std::move(e));
  }
  return QuantumChannel(std::move(kraus), "partial_trace",
                        ProductTraceLayout{dim_keep, dim_traced});
}

// E(w) = (1 - lambda) w + lambda Tr(w) I/d, written as a Heisenberg-Weyl
// unitary mixture (lambda = 1 is the fully depolarizing channel).
inline QuantumChannel make_depolarizing_channel(int dim, double lambda = 1.0) {
  if (dim < 1) throw InvalidParams("depolarizing channel: dim must be >= 1");
  if (lambda < 0.0 || lambda > 1.0)
    throw InvalidParams("depolarizing channel: lambda must be in [0,1]");
  const std::vector<Mat> hw = heisenberg_weyl(dim);
  const double base = lambda / (dim * dim);
  UnitaryMixture mix;
  std::vector<Mat> kraus;
  for (std::size_t j = 0; j < hw.size(); ++j) {
    const bool is_id = (hw[j] - Mat::Identity(dim, dim)).norm() < 1e-12;
    const double w = base + (is_id ? (1.0 - lambda) : 0.0);
    mix.unitaries.push_back(hw[j]);
    mix.weights.push_back(w);
    kraus.push_back(std::sqrt(w) * hw[j]);
  }
  return QuantumChannel(std::move(kraus), "depolarizing", std::move(mix));
}

inline QuantumChannel make_random_cptp(int dim_in, int dim_out, int kraus_count,
                                       std::uint64_t seed) {
  if (dim_in < 1 || dim_out < 1 || kraus_count < 1)
    throw InvalidParams("random_cptp: dims and kraus_count must be >= 1");
  Rng rng(seed);
  std::vector<Mat> g;
  Mat s = Mat::Zero(dim_in, dim_in);
  for (int k = 0; k < kraus_count; ++k) {
    g.push_back(ginibre(rng, dim_out, dim_in));
    s += g.back().adjoint() * g.back();
  }
  const Mat s_inv_half = pseudo_power(s, -0.5);
  std::vector<Mat> kraus;
  for (Mat& e : g) kraus.push_back(e * s_inv_half);
  return QuantumChannel(std::move(kraus), "random_cptp");
}

inline QuantumState random_state(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw InvalidParams("random_state: dim must be >= 1");
  Rng rng(seed);
  const Mat g = ginibre(rng, dim, dim);
  Mat rho = g * g.adjoint();
  rho /= rho.trace();
  rho = (1.0 - tol::state_mix) * rho +
        tol::state_mix * Mat::Identity(dim, dim) / static_cast<double>(dim);
  rho /= rho.trace();
  return QuantumState(rho);
}

}  // namespace alphaz
