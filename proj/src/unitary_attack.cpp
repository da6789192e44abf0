#include "qauth/unitary_attack.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qauth/errors.hpp"

namespace qauth {

const char* to_string(HCase c) {
  switch (c) {
    case HCase::kSquareNonsingular:
      return "square-nonsingular";
    case HCase::kLeftInvertible:
      return "left-invertible";
    case HCase::kRightInvertible:
      return "right-invertible";
    case HCase::kDeficient:
      return "deficient";
  }
  return "unknown";
}

GhOperators gh_operators(const CodingSet& cs, std::size_t k) {
  if (k == 0 || k >= cs.size()) {
    std::ostringstream os;
    os << "gh_operators: key " << k << " outside 1.." << cs.size() - 1;
    throw KeyError(os.str());
  }
  const BlockDecomposition u = io_decompose(cs.layout(), cs.unitary(k));
  return GhOperators{u.ii * u.ii.adjoint(), u.oi * u.oi.adjoint(),
                     u.ii * u.oi.adjoint()};
}

ComplexMatrix q_operator(const CodingSet& cs, const ComplexMatrix& f,
                         std::size_t k, const Tolerances& tol) {
  const ComplexMatrix& u = cs.unitary(k);
  if (f.rows() != u.rows() || f.cols() != u.cols()) {
    throw DimensionError("q_operator: attack has the wrong shape");
  }
  if (!is_unitary(f, tol.unitary)) {
    std::ostringstream os;
    os << "q_operator: attack is not unitary (defect " << unitarity_defect(f)
       << ")";
    throw DomainError(os.str());
  }
  return u.adjoint() * f * u;
}

namespace {

// Unknowns are the entries of F_ii (column-major, C^2 of them) followed by the
// entries of F_oo (D^2). Returns the global (row, col) of unknown j.
std::pair<Index, Index> unknown_position(Index j, Index c, Index d) {
  if (j < c * c) {
    return {j % c, j / c};
  }
  const Index local = j - c * c;
  return {c + local % d, c + local / d};
}

ComplexMatrix unknowns_to_matrix(const ComplexVector& x, Index c, Index d) {
  ComplexMatrix f = ComplexMatrix::Zero(c + d, c + d);
  for (Index j = 0; j < x.size(); ++j) {
    const auto [r, s] = unknown_position(j, c, d);
    f(r, s) = x(j);
  }
  return f;
}

// Stacks vec([E_rs, P_i(k)]) for every unknown (r, s) and every k >= 1.
ComplexMatrix commutant_constraints(const CodingSet& cs) {
  const Index c = cs.layout().code_dim();
  const Index d = cs.layout().complement_dim();
  const Index e = c + d;
  const Index unknowns = c * c + d * d;
  const Index keys = static_cast<Index>(cs.size()) - 1;
  ComplexMatrix a = ComplexMatrix::Zero(keys * e * e, unknowns);
  for (Index k = 1; k <= keys; ++k) {
    const ComplexMatrix p = transformed_projector(cs, static_cast<std::size_t>(k));
    const Index offset = (k - 1) * e * e;
    for (Index j = 0; j < unknowns; ++j) {
      const auto [r, s] = unknown_position(j, c, d);
      // E_rs P has row r equal to row s of P; P E_rs has column s equal to
      // column r of P.
      for (Index col = 0; col < e; ++col) {
        a(offset + col * e + r, j) += p(s, col);
      }
      for (Index row = 0; row < e; ++row) {
        a(offset + s * e + row, j) -= p(row, r);
      }
    }
  }
  return a;
}

}  // namespace

CommutantReport deterministic_attack_commutant(const CodingSet& cs,
                                               const Tolerances& tol) {
  const Index c = cs.layout().code_dim();
  const Index d = cs.layout().complement_dim();
  CommutantReport report;
  if (cs.size() == 1) {
    // No constraints beyond block-diagonality.
    const Index unknowns = c * c + d * d;
    report.dimension = unknowns;
    report.basis.reserve(static_cast<std::size_t>(unknowns));
    for (Index j = 0; j < unknowns; ++j) {
      report.basis.push_back(
          unknowns_to_matrix(ComplexVector::Unit(unknowns, j), c, d));
    }
  } else {
    const RankKernel rk = rank_and_kernel(commutant_constraints(cs), tol.rank_rel, 1.0);
    report.dimension = rk.kernel_basis.cols();
    report.sigma_max = rk.sigma_max;
    report.smallest_kept = rk.smallest_kept;
    report.largest_dropped = rk.largest_dropped;
    const double threshold = tol.rank_rel * std::max(rk.sigma_max, 1.0);
    report.borderline = (rk.rank > 0 && rk.smallest_kept < 1e3 * threshold) ||
                        (rk.largest_dropped > 1e-3 * threshold);
    for (Index j = 0; j < rk.kernel_basis.cols(); ++j) {
      report.basis.push_back(unknowns_to_matrix(rk.kernel_basis.col(j), c, d));
    }
  }
  if (report.dimension < 1) {
    throw InternalConsistencyError(
        "commutant: empty solution space although the identity always solves "
        "the system");
  }
  report.is_secure = report.dimension == 1;
  if (auto attack = extract_nonscalar_unitary(cs, report, tol)) {
    report.extracted_attack = std::move(attack->f);
    report.harmful = attack->harmful;
  }
  return report;
}

std::optional<ExtractedAttack> extract_nonscalar_unitary(
    const CodingSet& cs, const CommutantReport& report, const Tolerances& tol) {
  if (report.dimension <= 1) {
    return std::nullopt;
  }
  const Index e = cs.layout().total_dim();
  const ComplexMatrix id = ComplexMatrix::Identity(e, e);
  const Complex i_unit(0.0, 1.0);

  // The commutant of Hermitian projectors is closed under adjoints, so both
  // Hermitian parts of every basis element belong to it. A generic real
  // combination of them is non-scalar on every block where the commutant is.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  ComplexMatrix h = ComplexMatrix::Zero(e, e);
  for (const ComplexMatrix& b : report.basis) {
    const ComplexMatrix re = 0.5 * (b + b.adjoint());
    const ComplexMatrix im = -0.5 * i_unit * (b - b.adjoint());
    h += weight(rng) * re + weight(rng) * im;
  }
  h -= (h.trace() / static_cast<double>(e)) * id;
  h = 0.5 * (h + h.adjoint());
  const double spread = h.norm();
  if (spread < 1e-10) {
    throw InternalConsistencyError(
        "extract_nonscalar_unitary: every commutant element is scalar although "
        "the reported dimension exceeds one");
  }
  // Scale the spectrum into [-1, 1] so exp(i h) cannot wrap back to a scalar.
  const SpectralDecomposition spec = eigh(h, tol.hermitian);
  const double radius = std::max(std::abs(spec.eigenvalues.minCoeff()),
                                 std::abs(spec.eigenvalues.maxCoeff()));
  h /= radius;

  ExtractedAttack out{exp_i_hermitian(h, tol.hermitian), false};
  if (distance_from_scalar(out.f) <= 1e-6) {
    throw InternalConsistencyError(
        "extract_nonscalar_unitary: extracted attack is a scalar multiple of I");
  }
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const ComplexMatrix p = transformed_projector(cs, k);
    const double residual = commutator(out.f, p).norm();
    if (residual > tol.commutator) {
      std::ostringstream os;
      os << "extract_nonscalar_unitary: attack fails to commute with P_i(" << k
         << ") (residual " << residual << ")";
      throw InternalConsistencyError(os.str());
    }
    const BlockDecomposition q =
        io_decompose(cs.layout(), q_operator(cs, out.f, k, tol));
    if (distance_from_scalar(q.ii) > 1e-6) {
      out.harmful = true;
    }
  }
  return out;
}

double p_unitary(const CodingSet& cs, const ComplexMatrix& f,
                 const DensityOperator& rho, const Tolerances& tol) {
  const SpaceLayout& layout = cs.layout();
  if (f.rows() != layout.total_dim() || f.cols() != layout.total_dim()) {
    throw DimensionError("p_unitary: attack has the wrong shape");
  }
  if (!is_unitary(f, tol.unitary)) {
    std::ostringstream os;
    os << "p_unitary: attack is not unitary (defect " << unitarity_defect(f)
       << ")";
    throw DomainError(os.str());
  }
  if (!lies_in_code_space(layout, rho, tol.density)) {
    throw DomainError("p_unitary: the sent state must lie in the code space");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const ComplexMatrix& u = cs.unitary(k);
    // tr[P_i(k) F rho(k) F^dagger] = tr[P_i Q(k) rho Q(k)^dagger]
    const ComplexMatrix q = u.adjoint() * f * u;
    const ComplexMatrix top = q.topRows(layout.code_dim());
    sum += (top * rho.matrix() * top.adjoint()).trace().real();
  }
  return clamp_probability(sum / static_cast<double>(cs.size()),
                           tol.probability_slack);
}

ComplexMatrix block_preserving_attack(const CodingSet& cs,
                                      const std::vector<ComplexMatrix>& per_block,
                                      const Tolerances& tol) {
  const Index c = cs.layout().code_dim();
  const Index e = cs.layout().total_dim();
  if (per_block.size() != cs.size()) {
    std::ostringstream os;
    os << "block_preserving_attack: expected " << cs.size()
       << " per-block unitaries, got " << per_block.size();
    throw DimensionError(os.str());
  }
  std::vector<ComplexMatrix> projectors;
  projectors.reserve(cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k) {
    projectors.push_back(transformed_projector(cs, k));
  }
  for (std::size_t k = 0; k < cs.size(); ++k) {
    for (std::size_t l = k + 1; l < cs.size(); ++l) {
      const double overlap = (projectors[k] * projectors[l]).norm();
      if (overlap > tol.commutator) {
        std::ostringstream os;
        os << "block_preserving_attack: P_i(" << k << ") and P_i(" << l
           << ") are not orthogonal (|P P'| = " << overlap << ")";
        throw DomainError(os.str());
      }
    }
  }
  ComplexMatrix f = ComplexMatrix::Identity(e, e);
  for (std::size_t l = 0; l < cs.size(); ++l) {
    const ComplexMatrix& w = per_block[l];
    if (w.rows() != c || w.cols() != c) {
      throw DimensionError("block_preserving_attack: per-block unitary must be C x C");
    }
    if (!is_unitary(w, tol.unitary)) {
      throw DomainError("block_preserving_attack: per-block operator is not unitary");
    }
    const auto basis = cs.unitary(l).leftCols(c);
    f += basis * w * basis.adjoint() - projectors[l];
  }
  return f;
}

K2Analysis k2_structural_analysis(const CodingSet& cs, const Tolerances& tol) {
  if (cs.size() != 2) {
    std::ostringstream os;
    os << "k2_structural_analysis: needs exactly two unitaries, got "
       << cs.size();
    throw DomainError(os.str());
  }
  const Index c = cs.layout().code_dim();
  const Index d = cs.layout().complement_dim();
  const ComplexMatrix h = gh_operators(cs, 1).h;
  const SvdResult f = svd(h);
  const double sigma_max =
      f.singular_values.size() ? f.singular_values(0) : 0.0;

  K2Analysis out;
  ComplexMatrix sigma_pinv = ComplexMatrix::Zero(d, c);
  for (Index r = 0; r < f.singular_values.size(); ++r) {
    const double s = f.singular_values(r);
    if (sigma_max > 0.0 && s > tol.rank_rel * sigma_max) {
      sigma_pinv(r, r) = 1.0 / s;
      ++out.h_rank;
    }
  }
  // H = V Sigma W^dagger  =>  J = W Sigma^+ V^dagger
  out.j = f.right * sigma_pinv * f.left.adjoint();

  const Index full = std::min(c, d);
  if (out.h_rank == full && c == d) {
    out.h_case = HCase::kSquareNonsingular;
    out.certificate_residual =
        (h * out.j - ComplexMatrix::Identity(c, c)).norm();
  } else if (out.h_rank == full && c < d) {
    // H J = I_C: J is a right inverse of H.
    out.h_case = HCase::kRightInvertible;
    out.certificate_residual =
        (h * out.j - ComplexMatrix::Identity(c, c)).norm();
  } else if (out.h_rank == full) {
    out.h_case = HCase::kLeftInvertible;
    out.certificate_residual =
        (out.j * h - ComplexMatrix::Identity(d, d)).norm();
  } else {
    out.h_case = HCase::kDeficient;
    ComplexMatrix partial = ComplexMatrix::Zero(c, c);
    partial.topLeftCorner(out.h_rank, out.h_rank).setIdentity();
    out.certificate_residual =
        (h * out.j - f.left * partial * f.left.adjoint()).norm();
  }
  return out;
}

}  // namespace qauth
