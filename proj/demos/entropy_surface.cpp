// Sweeps a fixed pair of states across the (alpha, z) plane: prints the
// divergence surface with the validity region marked, the named slices
// through it, and the approach to the Umegaki value near alpha = 1.

#include <cstdio>

#include "alphaz/entropies.hpp"

using namespace alphaz;

int main() {
  const QuantumState rho = random_state(3, 7);
  const QuantumState sigma = random_state(3, 8);

  std::printf("divergence surface for a seeded pair of 3x3 states\n\n");
  std::printf("%8s", "alpha\\z");
  const double z_values[] = {0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  for (double z : z_values) std::printf("%10.2f", z);
  std::printf("\n");

  const double alpha_values[] = {0.25, 0.5, 0.75, 1.5, 2.0, 2.5, 3.0};
  for (double alpha : alpha_values) {
    std::printf("%8.2f", alpha);
    for (double z : z_values) {
      const ParamPoint pt(alpha, z);
      if (region_check(pt).valid)
        std::printf("%10.4f", d_alpha_z(pt, rho, sigma));
      else
        std::printf("%10s", "-");
    }
    std::printf("\n");
  }
  std::printf("\n('-' marks points outside the monotonicity region)\n\n");

  std::printf("named slices at alpha = 1.5\n");
  std::printf("  z = 1     (Petz)      %.6f\n", d_petz(1.5, rho, sigma));
  std::printf("  z = alpha (sandwiched) %.6f\n", d_sandwiched(1.5, rho, sigma));
  std::printf("  Umegaki limit          %.6f\n\n", d_umegaki(rho, sigma));

  std::printf("approach to the Umegaki value along z = alpha\n");
  const double du = d_umegaki(rho, sigma);
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double alpha = 1.0 + eps;
    const double d = d_alpha_z(ParamPoint(alpha, alpha), rho, sigma);
    std::printf("  alpha = 1 + %.0e: %.8f (error %.2e)\n", eps, d, std::abs(d - du));
  }
  return 0;
}
