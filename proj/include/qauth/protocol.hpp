#pragma once

// Tagging, encoding, decoding and verification of quantum messages with a
// unitary coding set, plus the i-o block decomposition of operators on the
// tagged-message space E = M (x) T.
//
// Every operator on E is expressed in the canonical ordering: the first C
// coordinates span the code space M (x) V and the last D span M (x) V-perp.
// In that ordering the projector onto the code space is diag(I_C, 0).

#include <cstdint>
#include <optional>
#include <vector>

#include "qauth/linalg.hpp"
#include "qauth/tolerances.hpp"

namespace qauth {

class SpaceLayout {
 public:
  /// Throws LayoutError unless m_dim >= 2, t_dim >= 2, 1 <= v_dim < t_dim and
  /// E = m_dim * t_dim <= max_dim.
  SpaceLayout(Index m_dim, Index t_dim, Index v_dim,
              std::size_t max_dim = Tolerances{}.max_dim);

  Index m_dim() const { return m_dim_; }
  Index t_dim() const { return t_dim_; }
  Index v_dim() const { return v_dim_; }

  /// C = m * v
  Index code_dim() const { return m_dim_ * v_dim_; }
  /// D = m * (t - v)
  Index complement_dim() const { return m_dim_ * (t_dim_ - v_dim_); }
  /// E = C + D
  Index total_dim() const { return m_dim_ * t_dim_; }

  /// D / C when C divides D.
  std::optional<Index> q() const;
  /// E / C when C divides E.
  std::optional<Index> p() const;

  /// The security-condition validators require C <= D.
  bool admits_validators() const { return code_dim() <= complement_dim(); }

  friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

 private:
  Index m_dim_;
  Index t_dim_;
  Index v_dim_;
};

/// Hermitian, positive semidefinite, unit-trace operator.
class DensityOperator {
 public:
  /// Throws DomainError when any invariant fails by more than tol.
  explicit DensityOperator(ComplexMatrix matrix, double tol = Tolerances{}.density);

  static DensityOperator maximally_mixed(Index dim);
  /// |psi><psi| / <psi|psi>; throws DomainError for a zero vector.
  static DensityOperator pure(const ComplexVector& psi);

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

/// Key-indexed family {U(0) = I, U(1), ..., U(K-1)} of unitaries on E.
class CodingSet {
 public:
  /// Throws DimensionError when a member is not E x E, and DomainError unless
  /// K >= 1, every member is unitary within tol and U(0) is exactly I.
  CodingSet(SpaceLayout layout, std::vector<ComplexMatrix> unitaries,
            double tol = Tolerances{}.unitary);

  const SpaceLayout& layout() const { return layout_; }
  std::size_t size() const { return unitaries_.size(); }
  /// Throws KeyError when k >= K.
  const ComplexMatrix& unitary(std::size_t k) const;
  const std::vector<ComplexMatrix>& unitaries() const { return unitaries_; }
  /// ceil(log2 K)
  int key_bits() const;

 private:
  SpaceLayout layout_;
  std::vector<ComplexMatrix> unitaries_;
};

/// The four blocks A_jk = P_j A P_k in the canonical ordering.
struct BlockDecomposition {
  ComplexMatrix ii;  // C x C
  ComplexMatrix io;  // C x D
  ComplexMatrix oi;  // D x C
  ComplexMatrix oo;  // D x D

  ComplexMatrix assemble() const;
};

struct Verification {
  double accept_prob = 0.0;
  /// P_i rho P_i / accept_prob
  std::optional<DensityOperator> accepted_state;
  /// Partial trace of the accepted state over the tag factor.
  std::optional<DensityOperator> recovered_plaintext;
};

/// perm[i] is the product-basis index (m * T + tag) placed at canonical
/// position i. Valid tags come first within T and the tag index runs fastest.
std::vector<Index> canonical_basis_permutation(const SpaceLayout& layout);

/// Re-express an E x E product-basis operator in the canonical ordering.
ComplexMatrix to_canonical(const SpaceLayout& layout, const ComplexMatrix& a);
ComplexMatrix from_canonical(const SpaceLayout& layout, const ComplexMatrix& a);

/// P_i = diag(I_C, 0)
ComplexMatrix code_projector(const SpaceLayout& layout);
/// P_o = diag(0, I_D)
ComplexMatrix complement_projector(const SpaceLayout& layout);

/// rho_M (x) rho_T in canonical ordering. rho_T is given in the basis of T
/// whose first v_dim vectors span V. Throws InvalidTagError when rho_T has
/// more than tol weight on V-perp, DimensionError on shape mismatch.
DensityOperator tag_message(const SpaceLayout& layout,
                            const DensityOperator& rho_m,
                            const DensityOperator& rho_t,
                            const Tolerances& tol = Tolerances{});

/// U(k) rho U(k)^dagger
DensityOperator encode(const CodingSet& cs, const DensityOperator& rho,
                       std::size_t k);
/// U(k)^dagger rho U(k)
DensityOperator decode(const CodingSet& cs, const DensityOperator& rho,
                       std::size_t k);

/// Projective test of the decoded state against the code space.
Verification verify(const SpaceLayout& layout, const DensityOperator& rho,
                    const Tolerances& tol = Tolerances{});

/// Throws DimensionError unless a is E x E.
BlockDecomposition io_decompose(const SpaceLayout& layout,
                                const ComplexMatrix& a);

/// P_i(k) = U(k) P_i U(k)^dagger
ComplexMatrix transformed_projector(const CodingSet& cs, std::size_t k);

/// Embeds a C x C density as diag(rho_ii, 0) on E.
DensityOperator embed_in_code_space(const SpaceLayout& layout,
                                    const DensityOperator& rho_ii);

/// True when P_i rho P_i = rho within tol.
bool lies_in_code_space(const SpaceLayout& layout, const DensityOperator& rho,
                        double tol = Tolerances{}.density);

/// Snap values within slack of [0, 1] onto the interval.
double clamp_probability(double p, double slack = Tolerances{}.probability_slack);

}  // namespace qauth
