#include "qauth/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qauth/errors.hpp"

namespace qauth {

namespace {

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << a.rows() << "x"
       << a.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

ComplexMatrix SvdResult::reconstruct() const {
  ComplexMatrix sigma = ComplexMatrix::Zero(left.cols(), right.cols());
  for (Index i = 0; i < singular_values.size(); ++i) {
    sigma(i, i) = singular_values(i);
  }
  return left * sigma * right.adjoint();
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                             std::size_t max_dim) {
  const auto rows = static_cast<std::size_t>(a.rows()) *
                    static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) *
                    static_cast<std::size_t>(b.cols());
  if (rows > max_dim || cols > max_dim) {
    std::ostringstream os;
    os << "tensor_product: result " << rows << "x" << cols
       << " exceeds dimension cap " << max_dim;
    throw DimensionError(os.str());
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix haar_unitary(Index dim, std::uint64_t seed) {
  if (dim < 1) {
    throw DimensionError("haar_unitary: dim must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix z(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    // A zero pivot has probability zero; leave the column as is.
    if (mag > 0.0) {
      q.col(j) *= d / mag;
    }
  }
  return q;
}

SvdResult svd(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU |
                                                Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "svd: decomposition of " << a.rows() << "x" << a.cols()
       << " matrix did not converge (info=" << static_cast<int>(solver.info())
       << ", reported rank " << solver.nonzeroSingularValues() << ")";
    throw NumericError(os.str());
  }
  return SvdResult{solver.matrixU(), solver.singularValues(),
                   solver.matrixV()};
}

SpectralDecomposition eigh(const ComplexMatrix& a, double hermitian_tol) {
  require_square(a, "eigh");
  const double defect = hermiticity_defect(a);
  if (defect > hermitian_tol) {
    std::ostringstream os;
    os << "eigh: matrix is not Hermitian (relative defect " << defect << ")";
    throw DomainError(os.str());
  }
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigh: Hermitian eigensolver did not converge");
  }
  return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

RankKernel rank_and_kernel(const ComplexMatrix& a, double rel_tol,
                           double scale) {
  RankKernel out;
  const Index cols = a.cols();
  if (a.rows() == 0 || cols == 0) {
    out.kernel_basis = ComplexMatrix::Identity(cols, cols);
    return out;
  }
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    throw NumericError("rank_and_kernel: SVD did not converge");
  }
  const RealVector& sv = solver.singularValues();
  out.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double threshold = rel_tol * std::max(out.sigma_max, scale);
  Index rank = 0;
  if (out.sigma_max > threshold) {
    while (rank < sv.size() && sv(rank) > threshold) {
      ++rank;
    }
  }
  out.rank = rank;
  out.smallest_kept = rank > 0 ? sv(rank - 1) : 0.0;
  out.largest_dropped = rank < sv.size() ? sv(rank) : 0.0;
  out.kernel_basis = solver.matrixV().rightCols(cols - rank);
  return out;
}

ComplexMatrix principal_power(const ComplexMatrix& u, double s,
                              const Tolerances& tol) {
  require_square(u, "principal_power");
  if (!is_unitary(u, tol.unitary)) {
    std::ostringstream os;
    os << "principal_power: input is not unitary (defect "
       << unitarity_defect(u) << ")";
    throw DomainError(os.str());
  }
  // Normal matrices have a diagonal Schur form: u = Z T Z^dagger.
  Eigen::ComplexSchur<ComplexMatrix> schur(u);
  if (schur.info() != Eigen::Success) {
    throw NumericError("principal_power: Schur decomposition did not converge");
  }
  const ComplexMatrix& z = schur.matrixU();
  const ComplexMatrix& t = schur.matrixT();
  const Index n = u.rows();
  ComplexVector phases(n);
  for (Index i = 0; i < n; ++i) {
    const double phase = std::arg(t(i, i));
    // Rounding can place an eigenvalue near -1 on either side of the cut.
    if (std::numbers::pi - std::abs(phase) < tol.branch_cut) {
      std::ostringstream os;
      os << "principal_power: eigenphase " << phase
         << " lies on the branch cut at -pi";
      throw DegenerateBranchError(os.str(), phase);
    }
    phases(i) = std::polar(1.0, s * phase);
  }
  return z * phases.asDiagonal() * z.adjoint();
}

ComplexMatrix exp_i_hermitian(const ComplexMatrix& h, double hermitian_tol) {
  const SpectralDecomposition spec = eigh(h, hermitian_tol);
  ComplexVector phases(spec.eigenvalues.size());
  for (Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::polar(1.0, spec.eigenvalues(i));
  }
  return spec.eigenvectors * phases.asDiagonal() *
         spec.eigenvectors.adjoint();
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  return u.allFinite() && unitarity_defect(u) < tol;
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  return (a - a.adjoint()).norm() / std::max(1.0, a.norm());
}

ComplexMatrix range_basis(const ComplexMatrix& a, double rel_tol) {
  if (a.size() == 0) {
    return ComplexMatrix(a.rows(), 0);
  }
  const SvdResult f = svd(a);
  const double sigma_max = f.singular_values.size() ? f.singular_values(0) : 0;
  Index rank = 0;
  if (sigma_max > 0.0) {
    while (rank < f.singular_values.size() &&
           f.singular_values(rank) > rel_tol * sigma_max) {
      ++rank;
    }
  }
  return f.left.leftCols(rank);
}

double distance_from_scalar(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    return 0.0;
  }
  const Complex mean = a.trace() / static_cast<double>(a.rows());
  return (a - mean * ComplexMatrix::Identity(a.rows(), a.cols())).norm();
}

}  // namespace qauth
