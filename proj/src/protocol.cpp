#include "qauth/protocol.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "qauth/errors.hpp"

namespace qauth {

// ---------------------------------------------------------------------------
// SpaceLayout

SpaceLayout::SpaceLayout(Index m_dim, Index t_dim, Index v_dim,
                         std::size_t max_dim)
    : m_dim_(m_dim), t_dim_(t_dim), v_dim_(v_dim) {
  std::ostringstream os;
  if (m_dim < 2) {
    os << "layout: message dimension must be >= 2 (got " << m_dim << ")";
  } else if (t_dim < 2) {
    os << "layout: tag dimension must be >= 2 (got " << t_dim << ")";
  } else if (v_dim < 1 || v_dim >= t_dim) {
    os << "layout: valid-tag dimension must satisfy 1 <= v < t (got v="
       << v_dim << ", t=" << t_dim << ")";
  } else if (static_cast<std::size_t>(m_dim) * static_cast<std::size_t>(t_dim) >
             max_dim) {
    os << "layout: total dimension " << m_dim * t_dim << " exceeds cap "
       << max_dim;
  } else {
    return;
  }
  throw LayoutError(os.str());
}

std::optional<Index> SpaceLayout::q() const {
  if (complement_dim() % code_dim() != 0) {
    return std::nullopt;
  }
  return complement_dim() / code_dim();
}

std::optional<Index> SpaceLayout::p() const {
  if (total_dim() % code_dim() != 0) {
    return std::nullopt;
  }
  return total_dim() / code_dim();
}

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(ComplexMatrix matrix, double tol)
    : matrix_(std::move(matrix)) {
  std::ostringstream os;
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    os << "density: expected a non-empty square matrix, got " << matrix_.rows()
       << "x" << matrix_.cols();
    throw DimensionError(os.str());
  }
  if (!matrix_.allFinite()) {
    throw DomainError("density: non-finite entries");
  }
  const double herm = hermiticity_defect(matrix_);
  if (herm > tol) {
    os << "density: not Hermitian (defect " << herm << ")";
    throw DomainError(os.str());
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol) {
    os << "density: trace " << tr.real() << "+" << tr.imag()
       << "i differs from 1";
    throw DomainError(os.str());
  }
  const ComplexMatrix sym = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym,
                                                      Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues()(0);
  if (min_eig < -tol) {
    os << "density: negative eigenvalue " << min_eig;
    throw DomainError(os.str());
  }
}

DensityOperator DensityOperator::maximally_mixed(Index dim) {
  return DensityOperator(ComplexMatrix::Identity(dim, dim) /
                         static_cast<double>(dim));
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  const double n2 = psi.squaredNorm();
  if (!(n2 > 0.0)) {
    throw DomainError("density: cannot build a pure state from a zero vector");
  }
  return DensityOperator(psi * psi.adjoint() / n2);
}

// ---------------------------------------------------------------------------
// CodingSet

CodingSet::CodingSet(SpaceLayout layout, std::vector<ComplexMatrix> unitaries,
                     double tol)
    : layout_(layout), unitaries_(std::move(unitaries)) {
  if (unitaries_.empty()) {
    throw DomainError("coding set: needs at least one unitary");
  }
  const Index e = layout_.total_dim();
  for (std::size_t k = 0; k < unitaries_.size(); ++k) {
    const ComplexMatrix& u = unitaries_[k];
    std::ostringstream os;
    if (u.rows() != e || u.cols() != e) {
      os << "coding set: U(" << k << ") is " << u.rows() << "x" << u.cols()
         << ", expected " << e << "x" << e;
      throw DimensionError(os.str());
    }
    if (!is_unitary(u, tol)) {
      os << "coding set: U(" << k << ") is not unitary (defect "
         << unitarity_defect(u) << ")";
      throw DomainError(os.str());
    }
  }
  if (unitaries_.front() != ComplexMatrix::Identity(e, e)) {
    throw DomainError("coding set: U(0) must be exactly the identity");
  }
}

const ComplexMatrix& CodingSet::unitary(std::size_t k) const {
  if (k >= unitaries_.size()) {
    std::ostringstream os;
    os << "key " << k << " out of range for a family of size "
       << unitaries_.size();
    throw KeyError(os.str());
  }
  return unitaries_[k];
}

int CodingSet::key_bits() const {
  int bits = 0;
  while ((std::size_t{1} << bits) < unitaries_.size()) {
    ++bits;
  }
  return bits;
}

// ---------------------------------------------------------------------------
// Blocks and orderings

ComplexMatrix BlockDecomposition::assemble() const {
  const Index c = ii.rows();
  const Index d = oo.rows();
  ComplexMatrix out(c + d, c + d);
  out.topLeftCorner(c, c) = ii;
  out.topRightCorner(c, d) = io;
  out.bottomLeftCorner(d, c) = oi;
  out.bottomRightCorner(d, d) = oo;
  return out;
}

std::vector<Index> canonical_basis_permutation(const SpaceLayout& layout) {
  const Index m = layout.m_dim();
  const Index t = layout.t_dim();
  const Index v = layout.v_dim();
  std::vector<Index> perm;
  perm.reserve(static_cast<std::size_t>(layout.total_dim()));
  for (Index mi = 0; mi < m; ++mi) {
    for (Index ti = 0; ti < v; ++ti) {
      perm.push_back(mi * t + ti);
    }
  }
  for (Index mi = 0; mi < m; ++mi) {
    for (Index ti = v; ti < t; ++ti) {
      perm.push_back(mi * t + ti);
    }
  }
  return perm;
}

namespace {

void require_total_dim(const SpaceLayout& layout, const ComplexMatrix& a,
                       const char* what) {
  const Index e = layout.total_dim();
  if (a.rows() != e || a.cols() != e) {
    std::ostringstream os;
    os << what << ": expected " << e << "x" << e << ", got " << a.rows() << "x"
       << a.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

ComplexMatrix to_canonical(const SpaceLayout& layout, const ComplexMatrix& a) {
  require_total_dim(layout, a, "to_canonical");
  const auto perm = canonical_basis_permutation(layout);
  const Index e = layout.total_dim();
  ComplexMatrix out(e, e);
  for (Index i = 0; i < e; ++i) {
    for (Index j = 0; j < e; ++j) {
      out(i, j) = a(perm[i], perm[j]);
    }
  }
  return out;
}

ComplexMatrix from_canonical(const SpaceLayout& layout,
                             const ComplexMatrix& a) {
  require_total_dim(layout, a, "from_canonical");
  const auto perm = canonical_basis_permutation(layout);
  const Index e = layout.total_dim();
  ComplexMatrix out(e, e);
  for (Index i = 0; i < e; ++i) {
    for (Index j = 0; j < e; ++j) {
      out(perm[i], perm[j]) = a(i, j);
    }
  }
  return out;
}

ComplexMatrix code_projector(const SpaceLayout& layout) {
  const Index e = layout.total_dim();
  ComplexMatrix p = ComplexMatrix::Zero(e, e);
  p.topLeftCorner(layout.code_dim(), layout.code_dim()).setIdentity();
  return p;
}

ComplexMatrix complement_projector(const SpaceLayout& layout) {
  const Index e = layout.total_dim();
  const Index d = layout.complement_dim();
  ComplexMatrix p = ComplexMatrix::Zero(e, e);
  p.bottomRightCorner(d, d).setIdentity();
  return p;
}

// ---------------------------------------------------------------------------
// Pipeline

DensityOperator tag_message(const SpaceLayout& layout,
                            const DensityOperator& rho_m,
                            const DensityOperator& rho_t,
                            const Tolerances& tol) {
  if (rho_m.dim() != layout.m_dim() || rho_t.dim() != layout.t_dim()) {
    std::ostringstream os;
    os << "tag_message: expected message/tag dimensions " << layout.m_dim()
       << "/" << layout.t_dim() << ", got " << rho_m.dim() << "/"
       << rho_t.dim();
    throw DimensionError(os.str());
  }
  const Index v = layout.v_dim();
  const Index w = layout.t_dim() - v;
  const double leak =
      rho_t.matrix().bottomRightCorner(w, w).trace().real();
  if (leak > tol.density) {
    std::ostringstream os;
    os << "tag_message: tag state has weight " << leak
       << " on the invalid-tag subspace";
    throw InvalidTagError(os.str());
  }
  const ComplexMatrix product =
      tensor_product(rho_m.matrix(), rho_t.matrix(), tol.max_dim);
  return DensityOperator(to_canonical(layout, product), tol.density);
}

DensityOperator encode(const CodingSet& cs, const DensityOperator& rho,
                       std::size_t k) {
  const ComplexMatrix& u = cs.unitary(k);
  require_total_dim(cs.layout(), rho.matrix(), "encode");
  return DensityOperator(u * rho.matrix() * u.adjoint());
}

DensityOperator decode(const CodingSet& cs, const DensityOperator& rho,
                       std::size_t k) {
  const ComplexMatrix& u = cs.unitary(k);
  require_total_dim(cs.layout(), rho.matrix(), "decode");
  return DensityOperator(u.adjoint() * rho.matrix() * u);
}

Verification verify(const SpaceLayout& layout, const DensityOperator& rho,
                    const Tolerances& tol) {
  require_total_dim(layout, rho.matrix(), "verify");
  const Index c = layout.code_dim();
  const ComplexMatrix block = rho.matrix().topLeftCorner(c, c);
  Verification out;
  out.accept_prob = clamp_probability(block.trace().real(),
                                      tol.probability_slack);
  if (out.accept_prob <= tol.probability_slack) {
    return out;
  }
  const ComplexMatrix accepted_block = block / out.accept_prob;
  ComplexMatrix accepted =
      ComplexMatrix::Zero(layout.total_dim(), layout.total_dim());
  accepted.topLeftCorner(c, c) = accepted_block;
  out.accepted_state.emplace(accepted, tol.density);

  // The code block is M (x) V with the valid-tag index running fastest.
  const Index m = layout.m_dim();
  const Index v = layout.v_dim();
  ComplexMatrix plain = ComplexMatrix::Zero(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) {
      Complex sum(0.0, 0.0);
      for (Index t = 0; t < v; ++t) {
        sum += accepted_block(a * v + t, b * v + t);
      }
      plain(a, b) = sum;
    }
  }
  out.recovered_plaintext.emplace(plain, tol.density);
  return out;
}

BlockDecomposition io_decompose(const SpaceLayout& layout,
                                const ComplexMatrix& a) {
  require_total_dim(layout, a, "io_decompose");
  const Index c = layout.code_dim();
  const Index d = layout.complement_dim();
  return BlockDecomposition{a.topLeftCorner(c, c), a.topRightCorner(c, d),
                            a.bottomLeftCorner(d, c),
                            a.bottomRightCorner(d, d)};
}

ComplexMatrix transformed_projector(const CodingSet& cs, std::size_t k) {
  const ComplexMatrix& u = cs.unitary(k);
  const Index c = cs.layout().code_dim();
  // U P_i U^dagger = (first C columns of U)(first C columns of U)^dagger
  const auto cols = u.leftCols(c);
  return cols * cols.adjoint();
}

DensityOperator embed_in_code_space(const SpaceLayout& layout,
                                    const DensityOperator& rho_ii) {
  const Index c = layout.code_dim();
  if (rho_ii.dim() != c) {
    std::ostringstream os;
    os << "embed_in_code_space: expected a " << c << "x" << c
       << " density, got dimension " << rho_ii.dim();
    throw DimensionError(os.str());
  }
  ComplexMatrix out = ComplexMatrix::Zero(layout.total_dim(), layout.total_dim());
  out.topLeftCorner(c, c) = rho_ii.matrix();
  return DensityOperator(out);
}

bool lies_in_code_space(const SpaceLayout& layout, const DensityOperator& rho,
                        double tol) {
  require_total_dim(layout, rho.matrix(), "lies_in_code_space");
  const Index c = layout.code_dim();
  const Index d = layout.complement_dim();
  // P_i rho P_i - rho has the io, oi and oo blocks of rho.
  const double off = std::sqrt(2.0 * rho.matrix().topRightCorner(c, d).squaredNorm() +
                               rho.matrix().bottomRightCorner(d, d).squaredNorm());
  return off < tol;
}

double clamp_probability(double p, double slack) {
  if (!(p >= -slack && p <= 1.0 + slack)) {
    std::ostringstream os;
    os << "probability " << p << " lies outside [0, 1] beyond slack " << slack;
    throw InternalConsistencyError(os.str());
  }
  if (p <= slack) {
    return 0.0;
  }
  if (p >= 1.0 - slack) {
    return 1.0;
  }
  return p;
}

}  // namespace qauth
