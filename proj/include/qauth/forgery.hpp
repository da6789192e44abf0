#pragma once

// Forgery attack: Eve discards the in-transit message and injects rho_E.
// A forged state passes with certainty iff rho_E = diag(rho_ii, 0) with
// rho_ii supported in the intersection of ker[U_io(k)^dagger] over k != 0.
// Otherwise the best she can do is the top eigenvector of sum_k P_i(k).

#include "qauth/linalg.hpp"
#include "qauth/protocol.hpp"

namespace qauth {

struct ForgeryReport {
  /// Orthonormal columns (C rows) spanning the perfect-forgery subspace of C.
  ComplexMatrix kernel_basis;
  bool perfect_forgery_exists = false;
  DensityOperator optimal_state;
  double optimal_p_forge = 0.0;
  /// Multiplicity of the top eigenvalue of sum_k P_i(k).
  Index top_multiplicity = 0;
  double top_eigenvalue = 0.0;
};

/// Intersection of ker[U_io(k)^dagger], k = 1..K-1, as orthonormal columns of
/// length C. Throws DegenerateFamilyError when K == 1.
ComplexMatrix forgery_kernel(const CodingSet& cs,
                             const Tolerances& tol = Tolerances{});

/// (1/K) sum_k tr[P_i(k) rho_E]
double p_forge(const CodingSet& cs, const DensityOperator& rho_e,
               const Tolerances& tol = Tolerances{});

/// Maximizes p_forge over all states on E. Throws DegenerateFamilyError when
/// K == 1.
ForgeryReport optimal_forgery(const CodingSet& cs,
                              const Tolerances& tol = Tolerances{});

/// diag(|psi><psi|, 0) for a vector psi of the code space (length C).
DensityOperator forged_state_from_code_vector(const SpaceLayout& layout,
                                              const ComplexVector& psi);

}  // namespace qauth
