#pragma once

// Every numerical threshold used by the library and its acceptance suite.
// All values are relative unless noted otherwise.

namespace alphaz::tol {

// Hermiticity defect allowed at construction, ||M - M*||_F <= hermit * ||M||_F.
inline constexpr double hermit = 1e-10;

// Eigendecomposition reconstruction and unitarity defect.
inline constexpr double recon = 1e-10;

// Positive-definiteness floor: min eigenvalue > pd_floor * max(1, max eigenvalue).
// Also the invertibility floor for singular values.
inline constexpr double pd_floor = 1e-12;

// Kraus completeness: ||sum E_k* E_k - I||_F <= kraus (absolute).
inline constexpr double kraus = 1e-10;

// Choi positivity witness: min eigenvalue >= -choi_psd (absolute).
inline constexpr double choi_psd = 1e-10;

// Stinespring dilation must reproduce the channel to this (absolute Frobenius).
inline constexpr double dilation = 1e-9;

// Parameter-region boundary snap (absolute distance in the (alpha, z) plane).
inline constexpr double region_boundary = 1e-12;

// Certificate residual verdicts: res <= cert * scale.
inline constexpr double cert = 1e-7;

// DPI equality of values: |gap| <= dpi_equal * (1 + |D(rho||sigma)|).
inline constexpr double dpi_equal = 1e-8;

// Exponent degeneracy guard for two-equation systems: |a1 b2 - a2 b1| must
// exceed degenerate_coeff * max coefficient magnitude.
inline constexpr double degenerate_coeff = 1e-12;

// Gradient-descent stopping rule: ||grad||_F <= grad * scale.
inline constexpr double grad = 1e-9;

// Iteration cap, backtracking factor, and initial step of optimize_pd.
inline constexpr int optimize_iter_cap = 5000;
inline constexpr double optimize_backtrack = 0.5;
inline constexpr double optimize_step0 = 1.0;

// Stationarity floor accepted when the line search stalls because double
// precision can no longer resolve an objective improvement.
inline constexpr double grad_stall = 1e-6;

// Central finite-difference step scale for gradient checks: h = fd_step * (1 + ||H||_F).
inline constexpr double fd_step = 1e-5;

// Support cutoff for pseudo-powers: eigenvalues <= support_cut * max eigenvalue
// are treated as exact zeros.
inline constexpr double support_cut = 1e-10;

// Weight of the maximally mixed admixture in random_state.
inline constexpr double state_mix = 1e-3;

// Midpoint convexity probes tolerate violations down to -convexity_slack.
inline constexpr double convexity_slack = 1e-10;

}  // namespace alphaz::tol
