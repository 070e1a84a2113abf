#pragma once
// Shared fixtures for the test binaries: the parameter grid covering all
// three validity cases and their boundaries, seeded random (rho, sigma, E)
// triples, and the constructed equality-case families.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "alphaz/channels.hpp"
#include "alphaz/entropies.hpp"

namespace fixtures {

using namespace alphaz;

// Twelve (alpha, z) points: interior and boundary samples of all three
// validity cases, including the case-2/case-3 overlap at alpha = 2.
inline std::vector<std::pair<double, double>> dpi_grid() {
  return {{0.5, 0.5},  {0.5, 1.2},  {0.25, 0.75}, {0.75, 0.75}, {1.5, 1.0}, {1.5, 0.75},
          {1.5, 1.5},  {2.0, 1.0},  {2.0, 2.0},   {3.0, 2.0},   {3.0, 3.0}, {2.5, 2.0}};
}

// Six-point subset used where a full sweep would be too slow; still touches
// every case id and a boundary point.
inline std::vector<std::pair<double, double>> region_grid_small() {
  return {{0.5, 0.5}, {0.5, 1.2}, {1.5, 1.0}, {2.0, 2.0}, {3.0, 2.0}, {2.5, 2.0}};
}

struct Triple {
  QuantumState rho;
  QuantumState sigma;
  QuantumChannel e;
};

inline Triple random_triple(std::uint64_t seed, Eigen::Index dim_in, Eigen::Index dim_out,
                            int kraus_count) {
  return Triple{random_state(dim_in, seed), random_state(dim_in, seed + 1),
                make_random_cptp(dim_in, dim_out, kraus_count, seed + 2)};
}

// State pair with a 10% maximally mixed admixture. Optimizer-block arithmetic
// raises state spectra to combined exponents as large as 3 in magnitude, so
// pairs drawn from the thin-floor ensemble can produce blocks whose condition
// number exceeds double precision; this ensemble caps the pair condition
// number at (10 * dim)^2 and keeps every derived block representable.
inline std::pair<QuantumState, QuantumState> conditioned_pair(Eigen::Index dim,
                                                              std::uint64_t seed) {
  auto draw = [dim](std::uint64_t s) {
    Rng rng(s);
    const Mat g = ginibre(rng, dim, dim);
    Mat m = g * g.adjoint();
    m /= m.trace();
    m = 0.9 * m + 0.1 * Mat::Identity(dim, dim) / static_cast<double>(dim);
    m /= m.trace();
    return QuantumState(m);
  };
  return {draw(seed), draw(seed + 1)};
}

// State that is block diagonal with respect to the given block sizes.
inline QuantumState block_diag_state(const std::vector<int>& blocks, std::uint64_t seed) {
  Eigen::Index dim = 0;
  for (int b : blocks) dim += b;
  Mat m = Mat::Zero(dim, dim);
  Rng rng(seed);
  Eigen::Index at = 0;
  for (int b : blocks) {
    const Mat g = ginibre(rng, b, b);
    m.block(at, at, b, b) = g * g.adjoint() + 1e-2 * Mat::Identity(b, b);
    at += b;
  }
  m /= m.trace();
  return QuantumState(m);
}

struct EqualityFixture {
  std::string name;
  QuantumState rho;
  QuantumState sigma;
  QuantumChannel e;
};

// Channel/state families for which the data processing inequality is an
// equality by construction: the identity map, a unitary rotation, a pinching
// whose blocks both states respect, and a partial trace acting on product
// states sharing the traced factor.
inline std::vector<EqualityFixture> equality_fixtures(Eigen::Index dim, std::uint64_t seed) {
  std::vector<EqualityFixture> out;
  Rng rng(seed);

  out.push_back({"identity", random_state(dim, seed + 1), random_state(dim, seed + 2),
                 make_identity_channel(dim)});

  out.push_back({"unitary", random_state(dim, seed + 3), random_state(dim, seed + 4),
                 make_unitary_channel(random_unitary(rng, dim))});

  std::vector<int> blocks;
  if (dim >= 2) blocks = {1, static_cast<int>(dim) - 1};
  else blocks = {1};
  out.push_back({"pinching", block_diag_state(blocks, seed + 5), block_diag_state(blocks, seed + 6),
                 make_pinching_channel(blocks)});

  const QuantumState tau = random_state(2, seed + 7);
  const QuantumState rho_a = random_state(dim, seed + 8);
  const QuantumState sigma_a = random_state(dim, seed + 9);
  out.push_back({"partial_trace", QuantumState(kron(rho_a.mat(), tau.mat())),
                 QuantumState(kron(sigma_a.mat(), tau.mat())),
                 make_partial_trace_channel(static_cast<int>(dim), 2)});

  return out;
}

}  // namespace fixtures
