#pragma once

// Coding-family generators, security-condition validators, the subspace
// overlap measure and the overlap sweep between coincident and orthogonal
// families.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qauth/linalg.hpp"
#include "qauth/protocol.hpp"

namespace qauth {

struct Condition {
  std::string name;
  bool pass = false;
  /// What the witness measures ("min rank", "max overlap", ...).
  std::string witness_label;
  double witness = 0.0;
  std::string detail;
};

struct ConditionReport {
  std::vector<Condition> conditions;

  bool pass() const;
  const Condition& at(const std::string& name) const;
};

struct SweepPoint {
  double s = 0.0;
  double overlap = 0.0;
  double optimal_p_forge = 0.0;
  Index commutant_dimension = 0;
  /// P^u_e of a block-preserving attack, present only where the
  /// interpolated code subspaces are mutually orthogonal.
  std::optional<double> p_unitary_block_bound;
};

/// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// U(0) = I and U(k) = haar_unitary(E, seed + k) for k >= 1.
CodingSet generate_generic_family(const SpaceLayout& layout, std::size_t k_count,
                                  std::uint64_t seed);

/// U(k) cyclically shifts the p = E / C blocks of size C by k positions, so
/// the P_i(k) project onto distinct blocks. Throws LayoutError unless C
/// divides E and 1 <= K <= p.
CodingSet generate_orthogonal_family(const SpaceLayout& layout,
                                     std::size_t k_count);

/// q + 1 unitaries with D = q C: U(k) rotates the code space into the k-th
/// C-dimensional block W_k of the complement through C distinct angles, after
/// an independent Haar change of basis of the code space. Satisfies every
/// unequal-dimension condition; regenerates with fresh derived seeds (up to 16
/// attempts) if a draw fails validation. Throws LayoutError when q < 2 and
/// GenerationError after 16 failures.
CodingSet generate_block_rotation_family(const SpaceLayout& layout,
                                         std::uint64_t seed,
                                         const Tolerances& tol = Tolerances{});

/// Conditions for C = D with U(1), U(2). Throws InsufficientFamilyError when
/// K < 3.
ConditionReport validate_equal_dims(const CodingSet& cs,
                                    const Tolerances& tol = Tolerances{});

/// Conditions for C < D, D = q C and K = q + 1. Throws DomainError on a
/// layout or family-size mismatch.
ConditionReport validate_unequal_dims(const CodingSet& cs,
                                      const Tolerances& tol = Tolerances{});

/// (a) every U_io(k)^dagger has rank C (sufficient); (b) the forgery kernel is
/// empty (necessary and sufficient).
ConditionReport validate_forgery(const CodingSet& cs,
                                 const Tolerances& tol = Tolerances{});

/// 2 / (K (K - 1) C) * sum_{k < k'} tr[P_i(k) P_i(k')]; 1 for coincident and
/// 0 for mutually orthogonal code subspaces. Throws DomainError when K < 2.
double overlap_measure(const CodingSet& cs);

/// dim(ker G_oi(k) intersected with ker G_oi(k')) for 1 <= k, k' < K.
Index shared_kernel_dimension(const CodingSet& cs, std::size_t k,
                              std::size_t k_prime,
                              const Tolerances& tol = Tolerances{});

/// Geodesic sweep U(k, s) = exp(s log V(k)) from the identity family (s = 0)
/// to a phase-twisted cyclic-shift family V(k) = exp(i delta_k) Shift^k
/// (s = 1). The seeded global phases delta_k keep every eigenphase away from
/// the logarithm's branch cut and do not change any projector. Throws
/// LayoutError when the layout has no orthogonal family with K members and
/// DomainError when K < 2 or steps < 2.
std::vector<SweepPoint> sweep_overlap(const SpaceLayout& layout,
                                      std::size_t k_count, std::size_t steps,
                                      std::uint64_t seed,
                                      const Tolerances& tol = Tolerances{});

/// Violations of the endpoint invariants (overlap/p_forge = 1/1 at s = 0 and
/// 0/(1/K) at s = 1 within 1e-9). Empty when the sweep is consistent.
std::vector<std::string> sweep_endpoint_violations(
    const std::vector<SweepPoint>& points, std::size_t k_count);

}  // namespace qauth
