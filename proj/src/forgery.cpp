#include "qauth/forgery.hpp"

#include <sstream>

#include "qauth/errors.hpp"

namespace qauth {

namespace {

void require_two_keys(const CodingSet& cs, const char* what) {
  if (cs.size() < 2) {
    std::ostringstream os;
    os << what << ": a single public rule makes the whole code space "
       << "forgeable; need K >= 2";
    throw DegenerateFamilyError(os.str());
  }
}

}  // namespace

ComplexMatrix forgery_kernel(const CodingSet& cs, const Tolerances& tol) {
  require_two_keys(cs, "forgery_kernel");
  const Index c = cs.layout().code_dim();
  const Index d = cs.layout().complement_dim();
  const Index keys = static_cast<Index>(cs.size()) - 1;
  ComplexMatrix stacked(keys * d, c);
  for (Index k = 1; k <= keys; ++k) {
    const BlockDecomposition u =
        io_decompose(cs.layout(), cs.unitary(static_cast<std::size_t>(k)));
    stacked.middleRows((k - 1) * d, d) = u.io.adjoint();
  }
  return rank_and_kernel(stacked, tol.rank_rel, 1.0).kernel_basis;
}

double p_forge(const CodingSet& cs, const DensityOperator& rho_e,
               const Tolerances& tol) {
  const Index e = cs.layout().total_dim();
  if (rho_e.dim() != e) {
    std::ostringstream os;
    os << "p_forge: expected a state of dimension " << e << ", got "
       << rho_e.dim();
    throw DimensionError(os.str());
  }
  const Index c = cs.layout().code_dim();
  double sum = 0.0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    // tr[P_i(k) rho] = tr[B^dagger rho B] with B the first C columns of U(k).
    const auto b = cs.unitary(k).leftCols(c);
    sum += (b.adjoint() * rho_e.matrix() * b).trace().real();
  }
  return clamp_probability(sum / static_cast<double>(cs.size()),
                           tol.probability_slack);
}

ForgeryReport optimal_forgery(const CodingSet& cs, const Tolerances& tol) {
  ComplexMatrix kernel = forgery_kernel(cs, tol);
  const Index e = cs.layout().total_dim();
  ComplexMatrix sum = ComplexMatrix::Zero(e, e);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    sum += transformed_projector(cs, k);
  }
  const SpectralDecomposition spec = eigh(sum, tol.hermitian);
  const Index top = e - 1;
  const double lambda_max = spec.eigenvalues(top);
  Index multiplicity = 0;
  for (Index i = top; i >= 0; --i) {
    if (lambda_max - spec.eigenvalues(i) > tol.eigen_gap * std::max(1.0, lambda_max)) {
      break;
    }
    ++multiplicity;
  }
  // Any maximizer attains the same value; take the one the solver ordered last.
  DensityOperator state = DensityOperator::pure(spec.eigenvectors.col(top));
  const double value = clamp_probability(
      lambda_max / static_cast<double>(cs.size()), tol.probability_slack);
  const bool perfect = kernel.cols() > 0;
  return ForgeryReport{std::move(kernel), perfect, std::move(state), value,
                       multiplicity, lambda_max};
}

DensityOperator forged_state_from_code_vector(const SpaceLayout& layout,
                                              const ComplexVector& psi) {
  if (psi.size() != layout.code_dim()) {
    std::ostringstream os;
    os << "forged_state_from_code_vector: expected a vector of length "
       << layout.code_dim() << ", got " << psi.size();
    throw DimensionError(os.str());
  }
  return embed_in_code_space(layout, DensityOperator::pure(psi));
}

}  // namespace qauth
