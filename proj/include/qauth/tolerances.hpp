#pragma once

#include <cstddef>

namespace qauth {

/// Shared numerical thresholds. Every relative threshold is taken against the
/// largest singular value (or the Frobenius norm for commutator residuals).
struct Tolerances {
  /// Singular values below rank_rel * sigma_max count as zero.
  double rank_rel = 1e-10;
  double hermitian = 1e-10;
  double unitary = 1e-10;
  /// Trace, positivity and support checks on density operators.
  double density = 1e-10;
  double commutator = 1e-8;
  /// Slack before clamping probabilities into [0, 1].
  double probability_slack = 1e-12;
  /// Relative eigenvalue gap below which two eigenvalues count as equal.
  double eigen_gap = 1e-8;
  double branch_cut = 1e-9;
  std::size_t max_dim = 4096;
};

}  // namespace qauth
