#include "qauth/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qauth/errors.hpp"
#include "qauth/forgery.hpp"
#include "qauth/unitary_attack.hpp"

namespace qauth {

bool ConditionReport::pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const Condition& c) { return c.pass; });
}

const Condition& ConditionReport::at(const std::string& name) const {
  for (const Condition& c : conditions) {
    if (c.name == name) {
      return c;
    }
  }
  throw std::out_of_range("no condition named " + name);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(base ^ mix(stream));
}

// ---------------------------------------------------------------------------
// Generators

CodingSet generate_generic_family(const SpaceLayout& layout, std::size_t k_count,
                                  std::uint64_t seed) {
  if (k_count < 1) {
    throw DomainError("generate_generic_family: K must be >= 1");
  }
  const Index e = layout.total_dim();
  std::vector<ComplexMatrix> us;
  us.reserve(k_count);
  us.push_back(ComplexMatrix::Identity(e, e));
  for (std::size_t k = 1; k < k_count; ++k) {
    us.push_back(haar_unitary(e, seed + k));
  }
  return CodingSet(layout, std::move(us));
}

namespace {

ComplexMatrix block_shift(Index blocks, Index block_size, Index shift) {
  const Index e = blocks * block_size;
  ComplexMatrix u = ComplexMatrix::Zero(e, e);
  for (Index j = 0; j < blocks; ++j) {
    const Index target = (j + shift) % blocks;
    u.block(target * block_size, j * block_size, block_size, block_size)
        .setIdentity();
  }
  return u;
}

Index require_orthogonal_layout(const SpaceLayout& layout, std::size_t k_count,
                                const char* what) {
  const auto p = layout.p();
  std::ostringstream os;
  if (!p) {
    os << what << ": C = " << layout.code_dim() << " does not divide E = "
       << layout.total_dim();
    throw LayoutError(os.str());
  }
  if (k_count < 1 || static_cast<Index>(k_count) > *p) {
    os << what << ": K = " << k_count << " must lie in 1.." << *p
       << " for mutually orthogonal code subspaces";
    throw LayoutError(os.str());
  }
  return *p;
}

}  // namespace

CodingSet generate_orthogonal_family(const SpaceLayout& layout,
                                     std::size_t k_count) {
  const Index p = require_orthogonal_layout(layout, k_count,
                                            "generate_orthogonal_family");
  std::vector<ComplexMatrix> us;
  us.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    us.push_back(block_shift(p, layout.code_dim(), static_cast<Index>(k)));
  }
  return CodingSet(layout, std::move(us));
}

CodingSet generate_block_rotation_family(const SpaceLayout& layout,
                                         std::uint64_t seed,
                                         const Tolerances& tol) {
  const auto q = layout.q();
  if (!q || *q < 2) {
    std::ostringstream os;
    os << "generate_block_rotation_family: needs D = q C with q >= 2 (C = "
       << layout.code_dim() << ", D = " << layout.complement_dim() << ")";
    throw LayoutError(os.str());
  }
  const Index c = layout.code_dim();
  const Index e = layout.total_dim();
  constexpr int kAttempts = 16;
  constexpr double kMargin = 0.1;
  const double width = (std::numbers::pi / 2 - 2 * kMargin) / static_cast<double>(c);

  std::optional<ConditionReport> last;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const std::uint64_t base = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    std::vector<ComplexMatrix> us;
    us.push_back(ComplexMatrix::Identity(e, e));
    for (Index k = 1; k <= *q; ++k) {
      const auto stream = static_cast<std::uint64_t>(2 * k);
      const ComplexMatrix v = haar_unitary(c, derive_seed(base, stream));
      std::mt19937_64 rng(derive_seed(base, stream + 1));
      // One angle per grid cell, jittered away from the cell edges.
      std::uniform_real_distribution<double> jitter(0.25, 0.75);
      RealVector cosines(c);
      RealVector sines(c);
      for (Index r = 0; r < c; ++r) {
        const double theta = kMargin + (static_cast<double>(r) + jitter(rng)) * width;
        cosines(r) = std::cos(theta);
        sines(r) = std::sin(theta);
      }
      const Index w = c + (k - 1) * c;  // first coordinate of W_k
      ComplexMatrix u = ComplexMatrix::Identity(e, e);
      const ComplexMatrix cos_c = cosines.cast<Complex>().asDiagonal();
      const ComplexMatrix sin_c = sines.cast<Complex>().asDiagonal();
      u.block(0, 0, c, c) = v * cos_c * v.adjoint();
      u.block(0, w, c, c) = -v * sin_c;
      u.block(w, 0, c, c) = sin_c * v.adjoint();
      u.block(w, w, c, c) = cos_c;
      us.push_back(std::move(u));
    }
    CodingSet cs(layout, std::move(us));
    ConditionReport report = validate_unequal_dims(cs, tol);
    if (report.pass()) {
      return cs;
    }
    last = std::move(report);
  }
  std::ostringstream os;
  os << "generate_block_rotation_family: " << kAttempts
     << " draws failed validation; last report:";
  for (const Condition& cond : last->conditions) {
    os << " [" << cond.name << (cond.pass ? " pass " : " FAIL ")
       << cond.witness_label << "=" << cond.witness << "]";
  }
  throw GenerationError(os.str());
}

// ---------------------------------------------------------------------------
// Validators

namespace {

double min_relative_gap(const RealVector& ascending) {
  if (ascending.size() < 2) {
    return std::numeric_limits<double>::infinity();
  }
  const double scale = ascending.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) {
    return 0.0;
  }
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 1; i < ascending.size(); ++i) {
    gap = std::min(gap, ascending(i) - ascending(i - 1));
  }
  return gap / scale;
}

double max_eigenvector_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.adjoint() * b).cwiseAbs().maxCoeff();
}

Condition rank_of_h_condition(const CodingSet& cs,
                              const std::vector<std::size_t>& keys,
                              const Tolerances& tol) {
  const Index c = cs.layout().code_dim();
  Index min_rank = c;
  std::ostringstream detail;
  for (std::size_t k : keys) {
    const Index r = rank_and_kernel(gh_operators(cs, k).h, tol.rank_rel, 1.0).rank;
    min_rank = std::min(min_rank, r);
    detail << "rank H(" << k << ")=" << r << " ";
  }
  return Condition{"max-rank-H", min_rank == c, "min rank",
                   static_cast<double>(min_rank), detail.str()};
}

Condition distinct_eigenvalue_condition(
    const std::vector<SpectralDecomposition>& g_ii,
    const std::vector<std::size_t>& keys, const Tolerances& tol) {
  double gap = std::numeric_limits<double>::infinity();
  std::ostringstream detail;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const double g = min_relative_gap(g_ii[i].eigenvalues);
    gap = std::min(gap, g);
    detail << "gap G_ii(" << keys[i] << ")=" << g << " ";
  }
  return Condition{"distinct-eigenvalues-G_ii", gap > tol.eigen_gap,
                   "min relative eigenvalue gap", gap, detail.str()};
}

}  // namespace

ConditionReport validate_equal_dims(const CodingSet& cs, const Tolerances& tol) {
  if (cs.size() < 3) {
    std::ostringstream os;
    os << "validate_equal_dims: needs U(1) and U(2), family has K = "
       << cs.size();
    throw InsufficientFamilyError(os.str());
  }
  const Index c = cs.layout().code_dim();
  const Index d = cs.layout().complement_dim();
  const std::vector<std::size_t> keys{1, 2};
  std::vector<SpectralDecomposition> g;
  for (std::size_t k : keys) {
    g.push_back(eigh(gh_operators(cs, k).g_ii, tol.hermitian));
  }

  ConditionReport report;
  report.conditions.push_back(Condition{"equal-dimensions", c == d, "D - C",
                                        static_cast<double>(d - c), ""});
  report.conditions.push_back(rank_of_h_condition(cs, keys, tol));
  report.conditions.push_back(distinct_eigenvalue_condition(g, keys, tol));
  const double overlap = max_eigenvector_overlap(g[0].eigenvectors, g[1].eigenvectors);
  report.conditions.push_back(Condition{"no-shared-eigenvector",
                                        overlap < 1.0 - tol.eigen_gap,
                                        "max eigenvector overlap", overlap,
                                        "G_ii(1) vs G_ii(2)"});
  return report;
}

ConditionReport validate_unequal_dims(const CodingSet& cs, const Tolerances& tol) {
  const SpaceLayout& layout = cs.layout();
  const Index c = layout.code_dim();
  const Index d = layout.complement_dim();
  const auto q = layout.q();
  std::ostringstream os;
  if (!(c < d) || !q) {
    os << "validate_unequal_dims: needs C < D with C dividing D (C = " << c
       << ", D = " << d << ")";
    throw DomainError(os.str());
  }
  if (static_cast<Index>(cs.size()) != *q + 1) {
    os << "validate_unequal_dims: needs K = q + 1 = " << *q + 1
       << " unitaries, family has " << cs.size();
    throw DomainError(os.str());
  }

  std::vector<std::size_t> keys;
  for (std::size_t k = 1; k < cs.size(); ++k) {
    keys.push_back(k);
  }
  std::vector<GhOperators> gh;
  std::vector<SpectralDecomposition> g_ii;
  std::vector<SpectralDecomposition> g_oi;
  for (std::size_t k : keys) {
    gh.push_back(gh_operators(cs, k));
    g_ii.push_back(eigh(gh.back().g_ii, tol.hermitian));
    g_oi.push_back(eigh(gh.back().g_oi, tol.hermitian));
  }

  ConditionReport report;
  report.conditions.push_back(rank_of_h_condition(cs, keys, tol));
  report.conditions.push_back(distinct_eigenvalue_condition(g_ii, keys, tol));

  // At least one pair of keys whose G_ii eigenbases share no eigenvector.
  double best = std::numeric_limits<double>::infinity();
  std::ostringstream pair_detail;
  for (std::size_t a = 0; a < keys.size(); ++a) {
    for (std::size_t b = a + 1; b < keys.size(); ++b) {
      const double ov =
          max_eigenvector_overlap(g_ii[a].eigenvectors, g_ii[b].eigenvectors);
      if (ov < best) {
        best = ov;
        pair_detail.str("");
        pair_detail << "best pair (" << keys[a] << ", " << keys[b] << ")";
      }
    }
  }
  report.conditions.push_back(Condition{"no-shared-eigenvector-pair",
                                        best < 1.0 - tol.eigen_gap,
                                        "min over pairs of max overlap", best,
                                        pair_detail.str()});

  // Ranges of the G_oi(k) are C-dimensional and mutually orthogonal.
  bool ranks_ok = true;
  std::vector<ComplexMatrix> ranges;
  std::ostringstream range_detail;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const RealVector& ev = g_oi[i].eigenvalues;
    const double top = ev(d - 1);
    const double cth = ev(d - c);
    if (!(top > 0.0) || cth <= tol.rank_rel * top) {
      ranks_ok = false;
      range_detail << "rank G_oi(" << keys[i] << ") < C ";
    }
    ranges.push_back(g_oi[i].eigenvectors.rightCols(c));
  }
  double residual = 0.0;
  for (std::size_t a = 0; a < ranges.size(); ++a) {
    for (std::size_t b = a + 1; b < ranges.size(); ++b) {
      residual = std::max(residual, (ranges[a].adjoint() * ranges[b]).norm());
    }
  }
  report.conditions.push_back(Condition{"orthogonal-G_oi-ranges",
                                        ranks_ok && residual < tol.commutator,
                                        "max |R_j^dagger R_k|_F", residual,
                                        range_detail.str()});
  return report;
}

ConditionReport validate_forgery(const CodingSet& cs, const Tolerances& tol) {
  const Index c = cs.layout().code_dim();
  const ComplexMatrix kernel = forgery_kernel(cs, tol);
  Index min_rank = c;
  std::ostringstream detail;
  for (std::size_t k = 1; k < cs.size(); ++k) {
    const BlockDecomposition u = io_decompose(cs.layout(), cs.unitary(k));
    const Index r = rank_and_kernel(u.io.adjoint(), tol.rank_rel, 1.0).rank;
    if (r < c) {
      detail << "rank U_io(" << k << ")^dagger=" << r << " ";
    }
    min_rank = std::min(min_rank, r);
  }
  ConditionReport report;
  report.conditions.push_back(Condition{"per-key-rank-U_io", min_rank == c,
                                        "min rank", static_cast<double>(min_rank),
                                        detail.str()});
  report.conditions.push_back(Condition{"empty-forgery-kernel", kernel.cols() == 0,
                                        "kernel dimension",
                                        static_cast<double>(kernel.cols()), ""});
  return report;
}

double overlap_measure(const CodingSet& cs) {
  const std::size_t k_count = cs.size();
  if (k_count < 2) {
    throw DomainError("overlap_measure: needs K >= 2");
  }
  const Index c = cs.layout().code_dim();
  std::vector<ComplexMatrix> bases;
  for (std::size_t k = 0; k < k_count; ++k) {
    bases.push_back(cs.unitary(k).leftCols(c));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t l = k + 1; l < k_count; ++l) {
      // tr[P_k P_l] = |B_k^dagger B_l|_F^2
      sum += (bases[k].adjoint() * bases[l]).squaredNorm();
    }
  }
  const double pairs = static_cast<double>(k_count * (k_count - 1)) / 2.0;
  return sum / (pairs * static_cast<double>(c));
}

Index shared_kernel_dimension(const CodingSet& cs, std::size_t k,
                              std::size_t k_prime, const Tolerances& tol) {
  const Index d = cs.layout().complement_dim();
  ComplexMatrix stacked(2 * d, d);
  stacked.topRows(d) = gh_operators(cs, k).g_oi;
  stacked.bottomRows(d) = gh_operators(cs, k_prime).g_oi;
  return rank_and_kernel(stacked, tol.rank_rel, 1.0).kernel_basis.cols();
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<SweepPoint> sweep_overlap(const SpaceLayout& layout,
                                      std::size_t k_count, std::size_t steps,
                                      std::uint64_t seed, const Tolerances& tol) {
  if (k_count < 2) {
    throw DomainError("sweep_overlap: needs K >= 2");
  }
  if (steps < 2) {
    throw DomainError("sweep_overlap: needs at least two grid points");
  }
  const Index p = require_orthogonal_layout(layout, k_count, "sweep_overlap");
  const Index c = layout.code_dim();
  const Index e = layout.total_dim();
  const CodingSet target = generate_orthogonal_family(layout, k_count);

  // Eigenphases of Shift^k are multiples of 2 pi / p. A global phase in
  // [-3/4, -1/4] * pi / p keeps them at least pi / (4 p) from the cut.
  std::vector<ComplexMatrix> twisted{target.unitary(0)};
  for (std::size_t k = 1; k < k_count; ++k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    std::uniform_real_distribution<double> phase(-0.75, -0.25);
    const double delta = phase(rng) * std::numbers::pi / static_cast<double>(p);
    twisted.push_back(std::polar(1.0, delta) * target.unitary(k));
  }

  std::vector<SweepPoint> points;
  points.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(steps - 1);
    std::vector<ComplexMatrix> us{ComplexMatrix::Identity(e, e)};
    for (std::size_t k = 1; k < k_count; ++k) {
      try {
        us.push_back(principal_power(twisted[k], s, tol));
      } catch (const DegenerateBranchError& err) {
        std::ostringstream os;
        os << "sweep_overlap: k = " << k << ", s = " << s << ": " << err.what();
        throw DegenerateBranchError(os.str(), err.phase());
      }
    }
    const CodingSet cs(layout, std::move(us));
    SweepPoint point;
    point.s = s;
    point.overlap = overlap_measure(cs);
    point.optimal_p_forge = optimal_forgery(cs, tol).optimal_p_forge;
    point.commutant_dimension = deterministic_attack_commutant(cs, tol).dimension;

    bool orthogonal = true;
    for (std::size_t k = 0; k < k_count && orthogonal; ++k) {
      for (std::size_t l = k + 1; l < k_count; ++l) {
        const auto bk = cs.unitary(k).leftCols(c);
        const auto bl = cs.unitary(l).leftCols(c);
        if ((bk.adjoint() * bl).norm() > tol.commutator) {
          orthogonal = false;
          break;
        }
      }
    }
    if (orthogonal) {
      std::vector<ComplexMatrix> per_block;
      for (std::size_t k = 0; k < k_count; ++k) {
        per_block.push_back(haar_unitary(c, derive_seed(seed, 1000 + k)));
      }
      const ComplexMatrix f = block_preserving_attack(cs, per_block, tol);
      point.p_unitary_block_bound = p_unitary(
          cs, f, embed_in_code_space(layout, DensityOperator::maximally_mixed(c)),
          tol);
    }
    points.push_back(point);
  }
  return points;
}

std::vector<std::string> sweep_endpoint_violations(
    const std::vector<SweepPoint>& points, std::size_t k_count) {
  constexpr double kTol = 1e-9;
  std::vector<std::string> out;
  if (points.size() < 2) {
    out.emplace_back("sweep has fewer than two points");
    return out;
  }
  auto check = [&](const char* what, double got, double want) {
    if (std::abs(got - want) > kTol) {
      std::ostringstream os;
      os << what << " = " << got << ", expected " << want;
      out.push_back(os.str());
    }
  };
  const SweepPoint& first = points.front();
  const SweepPoint& last = points.back();
  check("s at first point", first.s, 0.0);
  check("overlap at s = 0", first.overlap, 1.0);
  check("optimal_p_forge at s = 0", first.optimal_p_forge, 1.0);
  check("s at last point", last.s, 1.0);
  check("overlap at s = 1", last.overlap, 0.0);
  check("optimal_p_forge at s = 1", last.optimal_p_forge,
        1.0 / static_cast<double>(k_count));
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].s > points[i - 1].s)) {
      out.emplace_back("grid values of s are not ascending");
      break;
    }
  }
  return out;
}

}  // namespace qauth
