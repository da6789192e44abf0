#pragma once

// Dense complex-matrix primitives shared by every analysis in the library.
//
// Matrices are plain Eigen dense types. All routines are pure functions: they
// take inputs by const reference and return fresh values.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

#include "qauth/tolerances.hpp"

namespace qauth {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;  // columns, matching order
};

/// Full SVD: a = left * diag(singular_values) * right^dagger, with square
/// unitary factors and singular values sorted descending.
struct SvdResult {
  ComplexMatrix left;
  RealVector singular_values;
  ComplexMatrix right;

  /// left * Sigma * right^dagger, with Sigma padded to the input shape.
  ComplexMatrix reconstruct() const;
};

struct RankKernel {
  Index rank = 0;
  /// Orthonormal columns spanning the right null space (cols - rank columns).
  ComplexMatrix kernel_basis;
  double sigma_max = 0.0;
  /// Smallest singular value counted as nonzero (0 when rank == 0).
  double smallest_kept = 0.0;
  /// Largest singular value counted as zero (0 when there is none).
  double largest_dropped = 0.0;
};

/// Kronecker product; row index of (i_a, i_b) is i_a * b.rows() + i_b.
/// Throws DimensionError when either product dimension exceeds max_dim.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                             std::size_t max_dim = Tolerances{}.max_dim);

/// Haar-distributed unitary from the QR factorization of a complex Ginibre
/// matrix, with the column phases of Q fixed by diag(R). Deterministic in seed.
ComplexMatrix haar_unitary(Index dim, std::uint64_t seed);

SvdResult svd(const ComplexMatrix& a);

/// Throws DimensionError when a is not square and DomainError when it is not
/// Hermitian within hermitian_tol (relative to max(1, |a|_F)). Decomposes
/// (a + a^dagger) / 2.
SpectralDecomposition eigh(const ComplexMatrix& a,
                           double hermitian_tol = Tolerances{}.hermitian);

/// Numerical rank (singular values > rel_tol * max(sigma_max, scale)) and
/// right kernel. A positive scale keeps pure rounding noise from counting as
/// rank when the natural magnitude of the entries is known.
RankKernel rank_and_kernel(const ComplexMatrix& a,
                           double rel_tol = Tolerances{}.rank_rel,
                           double scale = 0.0);

/// exp(s * log u) with the principal logarithm (eigenphases in (-pi, pi]).
/// Throws DomainError for non-unitary u and DegenerateBranchError when an
/// eigenvalue lies within branch_cut (in phase) of -1.
ComplexMatrix principal_power(const ComplexMatrix& u, double s,
                              const Tolerances& tol = Tolerances{});

/// exp(i h) for Hermitian h, computed spectrally (always unitary).
ComplexMatrix exp_i_hermitian(const ComplexMatrix& h,
                              double hermitian_tol = Tolerances{}.hermitian);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// |u^dagger u - I|_F
double unitarity_defect(const ComplexMatrix& u);
bool is_unitary(const ComplexMatrix& u, double tol = Tolerances{}.unitary);

/// |a - a^dagger|_F / max(1, |a|_F)
double hermiticity_defect(const ComplexMatrix& a);

/// Orthonormal basis of the column space (numerical rank by rel_tol).
ComplexMatrix range_basis(const ComplexMatrix& a,
                          double rel_tol = Tolerances{}.rank_rel);

/// Frobenius distance from a to the nearest scalar multiple of the identity.
double distance_from_scalar(const ComplexMatrix& a);

}  // namespace qauth
