#pragma once

// Every tolerance and threshold used by the library, the test suites and the
// acceptance harness lives here, so that nothing is tuned ad hoc at call sites.

namespace wzw::tol {

// --- linear algebra -------------------------------------------------------
inline constexpr double hermitian_sym = 1e-12;       // |G - G^H| entrywise
inline constexpr double pd_relative = 1e-12;         // min eig > pd_relative * max eig
inline constexpr double membership = 1e-10;          // subspace containment residual
inline constexpr double loewner_slack = 1e-10;       // eigenvalues of whitened differences

// --- finite differences / quadrature --------------------------------------
inline constexpr double fd_target_rel = 1e-6;        // Richardson refinement target
inline constexpr double fd_base_step = 4e-2;         // initial centered-difference step
inline constexpr int fd_max_levels = 7;              // step halvings before giving up
inline constexpr double fd_fallback_rel = 1e-4;      // accept noise-limited nodes below this
inline constexpr double quad_rel = 1e-8;             // adaptive Gauss-Legendre target
inline constexpr double hilb_refine_rel = 1e-6;      // Gram change under node doubling

// --- fibered forms ---------------------------------------------------------
inline constexpr double fiber_pd_floor = 1e-8;       // whitened fiber-Hessian floor (warn below)
inline constexpr double fiber_negativity = 1e-8;     // abort when whitened min eig < -this

// --- caps -------------------------------------------------------------------
inline constexpr int cap_rank = 256;                 // N_k
inline constexpr long cap_sym_dim = 20000;           // dim Sym^l
inline constexpr int cap_moment_order = 12;

// --- acceptance thresholds (spec-pinned) ------------------------------------
inline constexpr double acc_product_saturation = 2e-3;   // criterion 1
inline constexpr double acc_lower_bound_slack = 5e-3;    // criterion 2
inline constexpr double acc_gap_10 = 0.15;               // criterion 3, degrees (1,0)
inline constexpr double acc_gap_m11 = 0.20;              // criterion 3, degrees (-1,1)
inline constexpr double acc_lemma71_eig = -1e-9;         // criterion 9
inline constexpr double acc_offdiag_scaling = 1e-4;      // criterion 9, Lemma 9.1 test
inline constexpr double acc_conservation = 1e-5;         // signed-integral residual
inline constexpr double acc_critical_residual = 1e-5;    // critical metric delta-residual
inline constexpr double acc_ray_residual = 1e-4;         // residual along rays, delta ~ 0
inline constexpr double acc_deriv_identity = 1e-6;       // Lemma 6.3 at step 1e-4
inline constexpr double deriv_fd_step = 1e-4;

}  // namespace wzw::tol
