#pragma once

// Eve's unitary attack: she conjugates the in-transit state by F. The attack
// passes verification with certainty iff the oi block of Q(k) = U(k)^dagger F
// U(k) vanishes for every key, i.e. iff F is block diagonal and commutes with
// every transformed projector P_i(k). Security is therefore decided by the
// dimension of that commutant.

#include <optional>
#include <vector>

#include "qauth/linalg.hpp"
#include "qauth/protocol.hpp"

namespace qauth {

/// Blocks of P_i(k): [[G_ii, H], [H^dagger, G_oi]].
struct GhOperators {
  ComplexMatrix g_ii;  // U_ii U_ii^dagger, C x C
  ComplexMatrix g_oi;  // U_oi U_oi^dagger, D x D
  ComplexMatrix h;     // U_ii U_oi^dagger, C x D
};

struct ExtractedAttack {
  ComplexMatrix f;
  /// Some decoded message is changed by more than a global phase.
  bool harmful = false;
};

struct CommutantReport {
  /// Complex dimension of the block-diagonal commutant (>= 1).
  Index dimension = 0;
  /// Frobenius-normalized block-diagonal E x E matrices spanning it.
  std::vector<ComplexMatrix> basis;
  bool is_secure = false;
  std::optional<ComplexMatrix> extracted_attack;
  std::optional<bool> harmful;

  // Spectrum of the constraint matrix around the nullspace threshold.
  double sigma_max = 0.0;
  double smallest_kept = 0.0;
  double largest_dropped = 0.0;
  /// Singular values lie within three decades of the threshold.
  bool borderline = false;
};

enum class HCase { kSquareNonsingular, kLeftInvertible, kRightInvertible, kDeficient };

const char* to_string(HCase c);

struct K2Analysis {
  Index h_rank = 0;
  HCase h_case = HCase::kDeficient;
  /// Pseudo-inverse of H(1) assembled from its SVD (D x C).
  ComplexMatrix j;
  /// Norm of the residual of the case's invertibility certificate.
  double certificate_residual = 0.0;
};

/// Requires 1 <= k < K; throws KeyError otherwise.
GhOperators gh_operators(const CodingSet& cs, std::size_t k);

/// Q(k) = U(k)^dagger F U(k). Throws DomainError for non-unitary f.
ComplexMatrix q_operator(const CodingSet& cs, const ComplexMatrix& f,
                         std::size_t k, const Tolerances& tol = Tolerances{});

/// Solves [F, P_i(k)] = 0 for k = 1..K-1 over block-diagonal F, and fills in
/// the extracted attack when the solution space is larger than the scalars.
CommutantReport deterministic_attack_commutant(const CodingSet& cs,
                                               const Tolerances& tol = Tolerances{});

/// A non-scalar unitary exp(i h) with h a generic Hermitian element of the
/// commutant, or nullopt when the commutant is one-dimensional.
std::optional<ExtractedAttack> extract_nonscalar_unitary(
    const CodingSet& cs, const CommutantReport& report,
    const Tolerances& tol = Tolerances{});

/// (1/K) sum_k tr[P_i(k) F rho(k) F^dagger] with rho(k) = U(k) rho U(k)^dagger.
/// Requires rho in the code space and f unitary (DomainError otherwise).
double p_unitary(const CodingSet& cs, const ComplexMatrix& f,
                 const DensityOperator& rho, const Tolerances& tol = Tolerances{});

/// F acting as per_block[l] inside each mutually orthogonal subspace C_l (in
/// the basis given by the first C columns of U(l)) and as the identity on the
/// rest. Throws DomainError when the P_i(k) are not mutually orthogonal.
ComplexMatrix block_preserving_attack(const CodingSet& cs,
                                      const std::vector<ComplexMatrix>& per_block,
                                      const Tolerances& tol = Tolerances{});

/// Rank classification of H(1) for a two-element family. Throws DomainError
/// unless K == 2.
K2Analysis k2_structural_analysis(const CodingSet& cs,
                                  const Tolerances& tol = Tolerances{});

}  // namespace qauth
